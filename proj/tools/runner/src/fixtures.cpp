#include <charconv>
#include <cmath>
#include <sstream>

#include "detail.hpp"

namespace stabilize::runner::detail {

Params::Params(const Json& json, std::string scope) : json_(&json), scope_(std::move(scope)) {
  if (!json.is_object()) throw ConfigError(scope_ + ": expected an object");
}

void Params::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(scope_ + "." + key + ": " + message);
}

const Json& Params::at(const std::string& key) const {
  if (!json_->contains(key)) fail(key, "missing");
  return json_->at(key);
}

double Params::number(const std::string& key, double lo, double hi) const {
  const Json& j = at(key);
  double x = 0.0;
  try {
    x = io::to_number(j);
  } catch (const Error& e) {
    fail(key, e.what());
  } catch (const Json::exception&) {
    fail(key, "expected a number");
  }
  if (!(x >= lo && x <= hi)) {
    std::ostringstream os;
    os << "value " << x << " outside [" << lo << ", " << hi << "]";
    fail(key, os.str());
  }
  return x;
}

double Params::number(const std::string& key, double fallback, double lo, double hi) const {
  return has(key) ? number(key, lo, hi) : fallback;
}

int Params::integer(const std::string& key, int lo, int hi) const {
  const Json& j = at(key);
  if (!j.is_number_integer()) fail(key, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi) fail(key, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
  return static_cast<int>(v);
}

int Params::integer(const std::string& key, int fallback, int lo, int hi) const {
  return has(key) ? integer(key, lo, hi) : fallback;
}

std::string Params::text(const std::string& key) const {
  const Json& j = at(key);
  if (!j.is_string()) fail(key, "expected a string");
  return j.get<std::string>();
}

std::string Params::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

void Artifacts::add_trace(const std::string& name, const CorrectionTrace& trace) {
  traces[name] = io::to_json(trace);
  curves.push_back({"trace_" + name + ".csv", io::trace_to_csv(trace)});
}

SemisimplePtr algebra_fixture(const Params& p, const std::string& key) {
  return resolve(p.scope() + "." + key, [&] { return io::algebra_from_json(p.at(key)); });
}

Representation representation_fixture(const Params& p, const std::string& key) {
  const Params r = p.child(key);
  const std::string kind = r.text("kind");
  return resolve(r.scope(), [&]() -> Representation {
    const auto field = [&] { return field_from_string(r.text("field", "complex")); };
    if (kind == "regular") return regular_representation(io::group_from_json(r.at("group")));
    if (kind == "standard") return standard_representation(io::group_from_json(r.at("group")), field());
    if (kind == "permutation") return permutation_representation(io::group_from_json(r.at("group")), field());
    if (kind == "rotation") return rotation_representation(r.integer("n", 1, kMaxGroupOrder), field());
    if (kind == "character") return character(r.integer("n", 1, kMaxGroupOrder), r.integer("k", 0, kMaxGroupOrder));
    if (kind == "sign") return sign_representation();
    if (kind == "trivial")
      return trivial_representation(io::group_from_json(r.at("group")), io::algebra_from_json(r.at("algebra")));
    if (kind == "explicit") return io::representation_from_json(r.at("value"));
    throw ConfigError(r.scope() + ".kind: unknown representation '" + kind + "'");
  });
}

Tower tower_fixture(const Params& p, const std::string& key) {
  return resolve(p.scope() + "." + key, [&] { return io::tower_from_json(p.at(key)); });
}

AlgebraElement random_element(const SemisimplePtr& algebra, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<Matrix> blocks;
  for (const auto& b : algebra->blocks()) {
    Matrix m(b.n, b.n);
    for (Index r = 0; r < b.n; ++r)
      for (Index c = 0; c < b.n; ++c) {
        const double re = normal(rng);
        m(r, c) = Complex{re, b.field == Field::Real ? 0.0 : normal(rng)};
      }
    blocks.push_back(std::move(m));
  }
  return {algebra, std::move(blocks)};
}

AlgebraElement random_unitary_near_one(const SemisimplePtr& algebra, double size, Rng& rng) {
  auto k = random_element(algebra, rng);
  k = (k - k.adjoint()) * Complex{0.5};
  const double norm = operator_norm(k);
  if (norm == 0.0 || size == 0.0) return AlgebraElement::identity(algebra);
  // K = iH with H Hermitian, so exp(K) = V exp(i lambda) V*.
  std::vector<Matrix> blocks;
  for (const auto& b : k.blocks()) {
    const Matrix h = Complex{0.0, -size / norm} * b;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    const Eigen::VectorXcd phases = (Complex{0.0, 1.0} * eig.eigenvalues().cast<Complex>()).array().exp();
    blocks.push_back(eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint());
  }
  return AlgebraElement::from_coords(algebra, algebra->from_blocks(blocks));
}

LinearMap random_map(const AlgebraPtr& source, const SemisimplePtr& target, double size, Rng& rng) {
  std::vector<AlgebraElement> images;
  double largest = 0.0;
  for (Index j = 0; j < source->dimension(); ++j) {
    images.push_back(random_element(target, rng));
    largest = std::max(largest, operator_norm(images.back()));
  }
  for (auto& x : images) x *= Complex{largest > 0.0 ? size / largest : 0.0};
  return LinearMap::from_images(source, images);
}

Json convergence_json(const std::vector<double>& defects) {
  const auto c = convergence_order(defects);
  return {{"constant", io::number(c.constant)}, {"order", io::number(c.order)}, {"ratios", c.ratios},
          {"quadratic", c.quadratic}};
}

std::string csv_number(double x) {
  char buf[32];
  return {buf, std::to_chars(buf, buf + sizeof buf, x).ptr};
}

}  // namespace stabilize::runner::detail
