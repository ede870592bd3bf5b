#pragma once

#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hessianlab/dirichlet.hpp"
#include "hessianlab/expression.hpp"
#include "hessianlab/quadratic_form.hpp"
#include "hessianlab/sigma.hpp"

namespace hessianlab {

namespace detail {

inline SymmetricMatrix matrix_from_json(const nlohmann::json& rows, int n) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("field spec: matrix must be an n x n array");
  SymmetricMatrix a(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("field spec: matrix must be an n x n array");
    for (int j = i; j < n; ++j) {
      const double hi = row[j].get<double>();
      const double lo = rows[j][i].get<double>();
      if (std::abs(hi - lo) > 1e-12)
        throw std::invalid_argument("field spec: matrix must be symmetric");
      a.set(i, j, hi);
    }
  }
  return a;
}

}  // namespace detail

/// Builds the quadratic x.Ax/2 + b.x + c described by a "quadratic" spec.
inline QuadraticForm quadratic_from_json(const nlohmann::json& spec, int n) {
  SymmetricMatrix a = spec.contains("matrix") ? detail::matrix_from_json(spec.at("matrix"), n)
                                              : SymmetricMatrix::identity(n);
  if (spec.contains("scale")) a = a.scaled(spec.at("scale").get<double>());
  Vec b = Vec::Zero(n);
  if (spec.contains("linear")) {
    const auto& lin = spec.at("linear");
    if (!lin.is_array() || static_cast<int>(lin.size()) != n)
      throw std::invalid_argument("field spec: linear must have n entries");
    for (int i = 0; i < n; ++i) b[i] = lin[i].get<double>();
  }
  return QuadraticForm(a, b, spec.value("constant", 0.0));
}

/// Builds a scalar field from a named analytic family spec:
///   {"type": "constant",  "value": 1.0}
///   {"type": "quadratic", "matrix": [[...]], "linear": [...], "constant": c}
///   {"type": "sharp-example"}                      x1^2 + x2^2
///   {"type": "cone", "scale": s}                   s * |x|
///   {"type": "expression", "formula": "abs(x3)"}
inline FieldPtr make_field(const nlohmann::json& spec, int n) {
  if (!spec.is_object() || !spec.contains("type"))
    throw std::invalid_argument("field spec: expected an object with a \"type\"");
  const std::string type = spec.at("type").get<std::string>();

  if (type == "constant") {
    const double v = spec.value("value", 0.0);
    return std::make_shared<const CallableField>(n, [v](const Vec&) { return v; });
  }
  if (type == "quadratic")
    return std::make_shared<const QuadraticForm>(quadratic_from_json(spec, n));
  if (type == "sharp-example") {
    if (n < 2) throw std::invalid_argument("field spec: sharp-example needs n >= 2");
    return std::make_shared<const CallableField>(
        n, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; });
  }
  if (type == "cone") {
    const double s = spec.value("scale", 1.0);
    return std::make_shared<const CallableField>(n, [s](const Vec& x) { return s * x.norm(); });
  }
  if (type == "expression") {
    if (!spec.contains("formula"))
      throw std::invalid_argument("field spec: expression needs a \"formula\"");
    return expression_field(spec.at("formula").get<std::string>(), n);
  }
  throw std::invalid_argument("field spec: unknown type \"" + type + "\"");
}

/// Deterministic family of exactly solvable problems: random positive
/// quadratics rescaled to sigma_2 = 1, one near-degenerate and one
/// degenerate cylinder member at the end. Solving the unit-ball problem
/// with f = 1 against each trace returns the quadratic itself, so the
/// family members are convex with known flat structure.
inline std::vector<QuadraticForm> unit_sigma2_quadratics(int n, std::size_t count,
                                                         std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("unit_sigma2_quadratics: n must be at least 2");
  if (count < 3) throw std::invalid_argument("unit_sigma2_quadratics: need at least 3 members");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);

  std::vector<QuadraticForm> family;
  family.reserve(count);
  while (family.size() < count - 2) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = entry(rng);
    Eigen::MatrixXd a = m.transpose() * m + 0.2 * Eigen::MatrixXd::Identity(n, n);
    SymmetricMatrix sym = SymmetricMatrix::from_dense(a);
    family.emplace_back(sym.scaled(1.0 / std::sqrt(sigma_k(sym, 2))), Vec::Zero(n), 0.0);
  }
  SymmetricMatrix near_deg(n);
  near_deg.set(0, 0, 1.0);
  near_deg.set(1, 1, 1.0);
  for (int i = 2; i < n; ++i) near_deg.set(i, i, 1e-3);
  family.emplace_back(near_deg.scaled(1.0 / std::sqrt(sigma_k(near_deg, 2))), Vec::Zero(n), 0.0);
  SymmetricMatrix deg(n);
  deg.set(0, 0, 1.0);
  deg.set(1, 1, 1.0);
  family.emplace_back(deg.scaled(1.0 / std::sqrt(sigma_k(deg, 2))), Vec::Zero(n), 0.0);
  return family;
}

/// Solves the unit-ball f = 1 problem against each quadratic's boundary
/// trace. The solutions reproduce the quadratics to solver tolerance.
inline std::vector<GridFunction> solve_quadratic_family(const std::vector<QuadraticForm>& family,
                                                        int n, int resolution,
                                                        const SolveOptions& opt = {}) {
  std::vector<GridFunction> solved;
  solved.reserve(family.size());
  for (const QuadraticForm& q : family) {
    DirichletProblem p;
    p.n = n;
    p.k = 2;
    p.domain = Domain{DomainKind::kBall, 1.0};
    p.rhs = std::make_shared<const CallableField>(n, [](const Vec&) { return 1.0; });
    p.boundary = std::make_shared<const QuadraticForm>(q);
    solved.push_back(solve_dirichlet(p, resolution, opt).first);
  }
  return solved;
}

}  // namespace hessianlab
