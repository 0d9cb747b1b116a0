#include "kam/serialization.hpp"

#include <cmath>
#include <limits>

#include "kam/errors.hpp"

namespace kam {

json series_to_json(const FourierSeries& f) {
  json j;
  j["dim"] = f.dim();
  j["cutoff"] = f.cutoff();
  const Shape s = f.shape();
  if (s.size() == 1 && s.rows == 1) {
    j["shape"] = "scalar";
  } else if (s.cols == 1) {
    j["shape"] = json::array({s.rows});
  } else {
    j["shape"] = json::array({s.rows, s.cols});
  }
  json coeffs = json::array();
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    bool zero = true;
    for (int c = 0; c < f.components(); ++c) zero = zero && f.coeff(m, c) == cplx(0.0, 0.0);
    if (zero) continue;
    json entry = json::array();
    entry.push_back(f.mode(m));
    if (f.components() == 1) {
      entry.push_back(f.coeff(m).real());
      entry.push_back(f.coeff(m).imag());
    } else {
      json re = json::array();
      json im = json::array();
      for (int c = 0; c < f.components(); ++c) {
        re.push_back(f.coeff(m, c).real());
        im.push_back(f.coeff(m, c).imag());
      }
      entry.push_back(re);
      entry.push_back(im);
    }
    coeffs.push_back(entry);
  }
  j["coeffs"] = coeffs;
  j["real"] = f.is_real();
  return j;
}

FourierSeries series_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int cutoff = j.at("cutoff").get<int>();
    Shape shape = Shape::scalar();
    const auto& sh = j.at("shape");
    if (sh.is_string()) {
      if (sh.get<std::string>() != "scalar") throw ConfigError("series: unknown shape string");
    } else if (sh.size() == 1) {
      shape = Shape::vector(sh[0].get<int>());
    } else if (sh.size() == 2) {
      shape = Shape::matrix(sh[0].get<int>(), sh[1].get<int>());
    } else {
      throw ConfigError("series: shape must be \"scalar\", [m] or [r, c]");
    }
    const bool real = j.value("real", true);
    FourierSeries f(dim, cutoff, shape, false);
    for (const auto& e : j.at("coeffs")) {
      const auto k = e.at(0).get<std::vector<int>>();
      if (!f.contains(k)) throw ConfigError("series: mode outside cutoff");
      const std::size_t idx = f.mode_index(k);
      if (f.components() == 1 && e.at(1).is_number()) {
        f.coeff(idx) = cplx(e.at(1).get<double>(), e.at(2).get<double>());
      } else {
        const auto re = e.at(1).get<std::vector<double>>();
        const auto im = e.at(2).get<std::vector<double>>();
        if (static_cast<int>(re.size()) != f.components() || re.size() != im.size())
          throw ConfigError("series: component count does not match shape");
        for (int c = 0; c < f.components(); ++c) f.coeff(idx, c) = cplx(re[c], im[c]);
      }
    }
    // exact on symmetric input: 0.5 * (a + a) == a
    if (real) f.symmetrize();
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("series: ") + e.what());
  }
}

json map_to_json(const FourierTaylorMap& f) {
  json j;
  j["n"] = f.n();
  j["m"] = f.m();
  j["degree"] = f.degree();
  j["cutoff"] = f.cutoff();
  // JSON has no infinity; an unbounded radius is written as "inf".
  if (std::isfinite(f.validity_radius()))
    j["validity_radius"] = f.validity_radius();
  else
    j["validity_radius"] = "inf";
  j["theta_rotation"] = f.rotation();
  json th = json::array();
  json rr = json::array();
  for (int mono = 0; mono < f.monomials().size(); ++mono) {
    if (f.theta_coeff(mono).max_abs() != 0.0)
      th.push_back({{"r", f.monomials().exponent(mono)}, {"series", series_to_json(f.theta_coeff(mono))}});
    if (f.r_coeff(mono).max_abs() != 0.0)
      rr.push_back({{"r", f.monomials().exponent(mono)}, {"series", series_to_json(f.r_coeff(mono))}});
  }
  j["theta_jets"] = th;
  j["r_jets"] = rr;
  return j;
}

namespace {

double radius_from_json(const json& j) {
  if (!j.contains("validity_radius")) return 0.5;
  const json& r = j.at("validity_radius");
  if (r.is_string() && r.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return r.get<double>();
}

}  // namespace

FourierTaylorMap map_from_json(const json& j) {
  try {
    FourierTaylorMap f(j.at("n").get<int>(), j.at("m").get<int>(), j.at("degree").get<int>(),
                       j.at("cutoff").get<int>(), radius_from_json(j));
    if (j.contains("theta_rotation")) f.set_rotation(j.at("theta_rotation").get<std::vector<double>>());
    auto load = [&](const char* key, bool theta) {
      if (!j.contains(key)) return;
      for (const auto& e : j.at(key)) {
        const auto exps = e.at("r").get<std::vector<int>>();
        const int mono = f.monomials().index(exps);
        if (mono < 0) throw ConfigError("map: jet exceeds degree");
        auto s = series_from_json(e.at("series"));
        if (s.dim() != f.n() || s.cutoff() != f.cutoff())
          throw ConfigError("map: jet series has wrong dim or cutoff");
        if (theta) {
          if (s.shape() != Shape::vector(f.n())) throw ConfigError("map: theta jet must be vector(n)");
          f.theta_coeff(mono) = s;
        } else {
          if (s.shape() != Shape::vector(f.m())) throw ConfigError("map: r jet must be vector(m)");
          f.r_coeff(mono) = s;
        }
      }
    };
    load("theta_jets", true);
    load("r_jets", false);
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("map: ") + e.what());
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a non-empty array of rows");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ConfigError("matrix: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace kam
