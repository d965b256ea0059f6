#include "milda/model_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace milda {

using nlohmann::json;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) raise(ErrorCode::ParseError, std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) raise(ErrorCode::ParseError, std::string(what) + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    raise(ErrorCode::ParseError, std::string(what) + " must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector r = vector_from(j[static_cast<std::size_t>(i)], what);
    if (r.size() != cols) raise(ErrorCode::ParseError, std::string(what) + " is ragged");
    m.row(i) = r.transpose();
  }
  return m;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) raise(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return *it;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

std::string model_to_json(const ProjectionModel& m) {
  json t;
  if (m.transform.whiten) t["whiten"] = to_json(*m.transform.whiten);
  t["shift"] = to_json(m.transform.shift);
  t["alpha"] = m.transform.alpha;
  if (m.transform.d_hat) t["d_hat"] = to_json(*m.transform.d_hat);

  json j;
  j["format"] = "milda-projection-model";
  j["version"] = kModelFormatVersion;
  j["w"] = to_json(m.w);
  j["threshold"] = m.threshold;
  j["orientation"] = m.orientation;
  j["transform"] = std::move(t);
  j["prior_kind"] = m.prior_kind;
  return j.dump(2) + "\n";
}

ProjectionModel model_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) raise(ErrorCode::ParseError, "model document must be an object");
  const int version = field(j, "version").get<int>();
  if (version != kModelFormatVersion) {
    raise(ErrorCode::ParseError, "unsupported model version " + std::to_string(version));
  }
  ProjectionModel m;
  m.w = vector_from(field(j, "w"), "w");
  if (m.w.size() == 0 || std::abs(m.w.norm() - 1.0) > 1e-12) {
    raise(ErrorCode::ParseError, "w must be a unit vector");
  }
  m.threshold = field(j, "threshold").get<double>();
  m.orientation = field(j, "orientation").get<int>();
  if (m.orientation != 1 && m.orientation != -1) {
    raise(ErrorCode::ParseError, "orientation must be +1 or -1");
  }
  const json& t = field(j, "transform");
  m.transform.shift = vector_from(field(t, "shift"), "shift");
  m.transform.alpha = field(t, "alpha").get<double>();
  if (t.contains("whiten")) m.transform.whiten = matrix_from(t["whiten"], "whiten");
  if (t.contains("d_hat")) m.transform.d_hat = vector_from(t["d_hat"], "d_hat");
  m.prior_kind = field(j, "prior_kind").get<std::string>();

  const auto d = m.w.size();
  if (m.transform.shift.size() != d ||
      (m.transform.whiten && (m.transform.whiten->rows() != d || m.transform.whiten->cols() != d)) ||
      (m.transform.d_hat && m.transform.d_hat->size() != d)) {
    raise(ErrorCode::DimensionMismatch, "model fields disagree on dimension");
  }
  return m;
}

std::string prior_to_json(const PriorKnowledge& p) {
  json j;
  j["kind"] = std::string(to_string(p.kind()));
  if (const auto* v = p.get_if<KnownClassMean>()) {
    j["mu_plus"] = to_json(v->mu_plus);
  } else if (const auto* v = p.get_if<KnownDifferenceDirection>()) {
    j["d"] = to_json(v->d);
  } else if (const auto* v = p.get_if<KnownScaledClassCovariances>()) {
    j["s_plus"] = to_json(v->s_plus);
    j["s_minus"] = to_json(v->s_minus);
    j["q"] = v->q;
  } else if (const auto* v = p.get_if<KnownSharedCovarianceShape>()) {
    j["s"] = to_json(v->s);
  }
  return j.dump(2) + "\n";
}

PriorKnowledge prior_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) raise(ErrorCode::ParseError, "prior document must be an object");
  switch (prior_kind_from_string(field(j, "kind").get<std::string>())) {
    case PriorKind::ClassMean:
      return KnownClassMean{vector_from(field(j, "mu_plus"), "mu_plus")};
    case PriorKind::DifferenceDirection:
      return KnownDifferenceDirection{vector_from(field(j, "d"), "d")};
    case PriorKind::ScaledClassCovariances:
      return KnownScaledClassCovariances{matrix_from(field(j, "s_plus"), "s_plus"),
                                         matrix_from(field(j, "s_minus"), "s_minus"),
                                         field(j, "q").get<double>()};
    case PriorKind::SharedCovarianceShape:
      return KnownSharedCovarianceShape{matrix_from(field(j, "s"), "s")};
  }
  raise(ErrorCode::ParseError, "unreachable prior kind");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << text;
}

}  // namespace milda
