#include "stabilize/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace stabilize::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw FormatError(std::string(what) + " must be an integer");
  return j.get<int>();
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw FormatError("complex entries must be numbers or [re, im] pairs");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

double to_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw FormatError("expected a number or \"inf\"");
}

// ---------------------------------------------------------------------------
// Algebras and elements

Json to_json(const SemisimpleAlgebra& algebra) {
  Json blocks = Json::array();
  for (const auto& b : algebra.blocks()) blocks.push_back({{"field", to_string(b.field)}, {"n", b.n}});
  return {{"blocks", blocks}};
}

SemisimplePtr algebra_from_json(const Json& j) {
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array()) throw FormatError("'blocks' must be an array");
  std::vector<Block> out;
  for (const auto& b : blocks) {
    Field f = Field::Complex;
    if (b.contains("field")) f = field_from_string(b.at("field").get<std::string>());
    out.push_back({f, integer(field(b, "n"), "block size")});
  }
  return construct_algebra(std::move(out));
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("matrix must be a non-empty array of rows");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) throw FormatError("matrix rows must have equal length");
    for (std::size_t c = 0; c < j[r].size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c]);
  }
  return m;
}

Json to_json(const AlgebraElement& element) {
  Json blocks = Json::array();
  for (const auto& b : element.blocks()) blocks.push_back(to_json(b));
  return blocks;
}

AlgebraElement element_from_json(const SemisimplePtr& algebra, const Json& j) {
  if (!j.is_array() || j.size() != algebra->block_count())
    throw FormatError("element needs one matrix per block of " + algebra->name());
  std::vector<Matrix> blocks;
  for (const auto& b : j) blocks.push_back(matrix_from_json(b));
  return {algebra, std::move(blocks)};
}

// ---------------------------------------------------------------------------
// Groups and representations

Json to_json(const FiniteGroup& group) {
  Json out = {{"order", group.order()}, {"table", group.table()}};
  if (!group.name().empty()) out["name"] = group.name();
  return out;
}

GroupPtr group_from_json(const Json& j) {
  if (j.is_string() || (j.is_object() && j.contains("builtin"))) {
    const auto name = j.is_string() ? j.get<std::string>() : j.at("builtin").get<std::string>();
    if (name == "S3") return make_group(FiniteGroup::symmetric3());
    if (name == "S4") return make_group(FiniteGroup::symmetric4());
    if (name == "D4") return make_group(FiniteGroup::dihedral4());
    if (name == "Q8") return make_group(FiniteGroup::quaternion8());
    if (name == "trivial") return make_group(FiniteGroup::cyclic(1));
    if (name.starts_with("Z/")) return make_group(FiniteGroup::cyclic(std::stoi(name.substr(2))));
    throw FormatError("unknown builtin group '" + name + "'");
  }
  if (j.is_object() && j.contains("cyclic")) return make_group(FiniteGroup::cyclic(integer(j.at("cyclic"), "cyclic order")));
  const int order = integer(field(j, "order"), "group order");
  const Json& table = field(j, "table");
  if (!table.is_array() || static_cast<int>(table.size()) != order) throw FormatError("table must have 'order' rows");
  std::vector<std::vector<int>> t;
  for (const auto& row : table) {
    if (!row.is_array()) throw FormatError("table rows must be arrays");
    std::vector<int> r;
    for (const auto& x : row) r.push_back(integer(x, "table entry"));
    t.push_back(std::move(r));
  }
  return make_group(FiniteGroup(std::move(t), j.value("name", std::string{})));
}

Json to_json(const Representation& phi) {
  Json values = Json::array();
  for (const auto& v : phi.values()) values.push_back(to_json(v));
  return {{"group", to_json(*phi.group())},
          {"algebra", to_json(*phi.target())},
          {"values", values},
          {"unitary", phi.unitary()},
          {"exact", phi.exact()}};
}

Representation representation_from_json(const Json& j) {
  auto group = group_from_json(field(j, "group"));
  auto algebra = algebra_from_json(field(j, "algebra"));
  const Json& values = field(j, "values");
  if (!values.is_array()) throw FormatError("'values' must be an array");
  std::vector<AlgebraElement> out;
  for (const auto& v : values) out.push_back(element_from_json(algebra, v));
  std::optional<bool> unitary, exact;
  if (j.contains("unitary")) unitary = j.at("unitary").get<bool>();
  if (j.contains("exact")) exact = j.at("exact").get<bool>();
  return {group, algebra, std::move(out), unitary, exact};
}

// ---------------------------------------------------------------------------
// Banach spaces

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("matrix must be a non-empty array of rows");
  RealMatrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) throw FormatError("matrix rows must have equal length");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = to_number(j[r][c]);
  }
  return m;
}

Json to_json(const FinDimBanachSpace& space) {
  switch (space.kind()) {
    case NormKind::P: return {{"kind", "p"}, {"dimension", space.dimension()}, {"p", number(space.p())}};
    case NormKind::Polytope: return {{"kind", "polytope"}, {"facets", to_json(space.facets())}};
    case NormKind::Ellipsoid: return {{"kind", "ellipsoid"}, {"form", to_json(space.form())}};
  }
  return {};
}

FinDimBanachSpace norm_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "p") return FinDimBanachSpace::lp(integer(field(j, "dimension"), "dimension"), to_number(field(j, "p")));
  if (kind == "polytope") return FinDimBanachSpace::polytope(real_matrix_from_json(field(j, "facets")));
  if (kind == "ellipsoid") return FinDimBanachSpace::ellipsoid(real_matrix_from_json(field(j, "form")));
  if (kind == "polygon") return polygon_space(integer(field(j, "i"), "polygon index"));
  throw FormatError("unknown norm kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Towers

Tower tower_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  std::vector<Block> start = algebra_from_json(field(j, "start"))->blocks();
  const Json& steps = field(j, "steps");
  if (!steps.is_array()) throw FormatError("'steps' must be an array");
  if (kind == "af") {
    std::vector<AfStep> out;
    for (const auto& s : steps) {
      AfStep step;
      for (const auto& row : field(s, "multiplicities")) {
        std::vector<int> r;
        for (const auto& x : row) r.push_back(integer(x, "multiplicity"));
        step.multiplicities.push_back(std::move(r));
      }
      if (s.contains("target_sizes"))
        for (const auto& x : s.at("target_sizes")) step.target_sizes.push_back(integer(x, "target size"));
      out.push_back(std::move(step));
    }
    return build_af_tower(std::move(start), out);
  }
  if (kind == "surjective") {
    std::vector<ProjectionStep> out;
    for (const auto& s : steps) {
      ProjectionStep step;
      for (const auto& x : field(s, "selections")) step.selections.push_back(integer(x, "selection"));
      out.push_back(std::move(step));
    }
    return build_surjective_tower(std::move(start), out);
  }
  throw FormatError("unknown tower kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Spaces and measures

SpacePtr space_from_json(const Json& j) {
  if (j.is_object() && j.contains("line")) {
    std::vector<double> xs;
    for (const auto& x : j.at("line")) xs.push_back(to_number(x));
    return std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::on_line(xs));
  }
  return std::make_shared<const FiniteMetricSpace>(real_matrix_from_json(field(j, "distances")));
}

Json to_json(const FiniteMetricSpace& space) {
  Json rows = Json::array();
  for (int x = 0; x < space.size(); ++x) {
    Json row = Json::array();
    for (int y = 0; y < space.size(); ++y) row.push_back(number(space(x, y)));
    rows.push_back(std::move(row));
  }
  return {{"distances", rows}};
}

FinitelySupportedMeasure measure_from_json(const SpacePtr& space, const Json& j) {
  const auto kind_name = j.value("kind", std::string("probability"));
  MeasureKind kind;
  if (kind_name == "probability")
    kind = MeasureKind::Probability;
  else if (kind_name == "acvx")
    kind = MeasureKind::AbsolutelyConvex;
  else
    throw FormatError("unknown measure kind '" + kind_name + "'");
  const Json& weights = field(j, "weights");
  if (!weights.is_array()) throw FormatError("'weights' must be an array");
  Eigen::VectorXcd w(static_cast<Index>(weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k) w(static_cast<Index>(k)) = complex_from_json(weights[k]);
  return {space, std::move(w), kind};
}

Json to_json(const FinitelySupportedMeasure& mu) {
  Json weights = Json::array();
  for (Index k = 0; k < mu.weights().size(); ++k) weights.push_back(complex_to_json(mu.weights()(k)));
  return {{"kind", mu.kind() == MeasureKind::Probability ? "probability" : "acvx"}, {"weights", weights}};
}

// ---------------------------------------------------------------------------
// Traces

Json to_json(const CorrectionTrace& trace) {
  Json defects = Json::array();
  for (double d : trace.defects) defects.push_back(number(d));
  return {{"iterations", trace.iterations},
          {"defects", defects},
          {"converged", trace.converged},
          {"distance_to_input", number(trace.distance_to_input)},
          {"unit_defect", number(trace.unit_defect)}};
}

std::string trace_to_csv(const CorrectionTrace& trace) {
  std::string out = "iteration,defect\n";
  char buf[32];
  for (std::size_t n = 0; n < trace.defects.size(); ++n) {
    // Shortest representation that round-trips.
    const auto end = std::to_chars(buf, buf + sizeof buf, trace.defects[n]).ptr;
    out += std::to_string(n) + ',' + std::string(buf, end) + '\n';
  }
  return out;
}

}  // namespace stabilize::io
