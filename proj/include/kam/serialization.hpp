#pragma once

#include <json.hpp>

#include "kam/fourier_series.hpp"
#include "kam/fourier_taylor.hpp"

namespace kam {

using json = nlohmann::json;

/// {dim, cutoff, shape, coeffs: [[k...], re, im]...}; shape is "scalar",
/// [m] or [r, c]. For non-scalar values re and im are arrays over the
/// components (row-major). Zero coefficients are omitted.
json series_to_json(const FourierSeries& f);
FourierSeries series_from_json(const json& j);

/// {n, m, degree, cutoff, validity_radius, theta_rotation, theta_jets,
/// r_jets}; each jet list holds {"r": exponents, "series": ...} entries.
json map_to_json(const FourierTaylorMap& f);
FourierTaylorMap map_from_json(const json& j);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

}  // namespace kam
