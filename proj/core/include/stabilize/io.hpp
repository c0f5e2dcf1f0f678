#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "stabilize/algebra.hpp"
#include "stabilize/banach.hpp"
#include "stabilize/colimit.hpp"
#include "stabilize/group.hpp"
#include "stabilize/measure.hpp"
#include "stabilize/representation.hpp"
#include "stabilize/stabilization.hpp"

namespace stabilize::io {

using Json = nlohmann::json;

/// Malformed or inconsistent serialized input.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Finite doubles as numbers, infinities as the strings "inf" / "-inf".
Json number(double x);
double to_number(const Json& j);

/// {"blocks":[{"field":"complex","n":2}, ...]}
Json to_json(const SemisimpleAlgebra& algebra);
SemisimplePtr algebra_from_json(const Json& j);

/// Blocks -> rows -> [re, im] pairs.
Json to_json(const AlgebraElement& element);
AlgebraElement element_from_json(const SemisimplePtr& algebra, const Json& j);

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"order":n,"table":[[...]]}; also accepts {"builtin":"S3"} and {"cyclic":n}.
Json to_json(const FiniteGroup& group);
GroupPtr group_from_json(const Json& j);

/// {"group":..., "algebra":..., "values":[...], "unitary":b, "exact":b}.
Json to_json(const Representation& phi);
Representation representation_from_json(const Json& j);

/// {"kind":"p","dimension":d,"p":p|"inf"}, {"kind":"polytope","facets":[[..]]},
/// {"kind":"ellipsoid","form":[[..]]}, {"kind":"polygon","i":i}.
Json to_json(const FinDimBanachSpace& space);
FinDimBanachSpace norm_from_json(const Json& j);
RealMatrix real_matrix_from_json(const Json& j);
Json to_json(const RealMatrix& m);

/// {"kind":"af","start":{algebra},"steps":[{"multiplicities":[[..]],"target_sizes":[..]}]}
/// {"kind":"surjective","start":{algebra},"steps":[{"selections":[..]}]}
Tower tower_from_json(const Json& j);

/// {"distances":[[..]]} (entries may be "inf") or {"line":[x0, x1, ...]}.
SpacePtr space_from_json(const Json& j);
Json to_json(const FiniteMetricSpace& space);

/// {"kind":"probability"|"acvx","weights":[w | [re, im], ...]}.
FinitelySupportedMeasure measure_from_json(const SpacePtr& space, const Json& j);
Json to_json(const FinitelySupportedMeasure& mu);

/// {"iterations","defects","converged","distance_to_input","unit_defect"}.
Json to_json(const CorrectionTrace& trace);
/// "iteration,defect" header plus one row per recorded defect.
std::string trace_to_csv(const CorrectionTrace& trace);

}  // namespace stabilize::io
