#include "eigenbound/problem.hpp"

#include <cctype>

#include "eigenbound/errors.hpp"

namespace eigenbound {

ProblemKind parse_problem_kind(const std::string& text) {
  std::string t;
  t.reserve(text.size());
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "friedrichs") return ProblemKind::Friedrichs;
  if (t == "poincare") return ProblemKind::Poincare;
  if (t == "trace") return ProblemKind::Trace;
  throw ConfigError("unknown problem kind '" + text + "' (expected friedrichs, poincare or trace)");
}

std::string problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Friedrichs: return "friedrichs";
    case ProblemKind::Poincare: return "poincare";
    case ProblemKind::Trace: return "trace";
  }
  return "?";
}

void ProblemSpec::validate() const {
  if (coefficients.diffusion.empty()) throw CoefficientError("no diffusion coefficients given");
  if (coefficients.reaction.size() != coefficients.diffusion.size())
    throw CoefficientError("reaction list size differs from diffusion list size");
  for (std::size_t r = 0; r < coefficients.diffusion.size(); ++r) {
    const Eigen::Matrix2d& a = coefficients.diffusion[r];
    if (a(0, 1) != a(1, 0))
      throw CoefficientError("diffusion matrix of region " + std::to_string(r) + " is not symmetric");
    if (!(a(0, 0) > 0.0) || !(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) > 0.0))
      throw CoefficientError("diffusion matrix of region " + std::to_string(r) + " is not positive definite");
    if (coefficients.reaction[r] < 0.0)
      throw CoefficientError("reaction coefficient of region " + std::to_string(r) + " is negative");
  }

  bool used_reaction_positive = false;
  for (const Triangle& t : mesh.triangles) {
    if (t.region < 0 || static_cast<std::size_t>(t.region) >= coefficients.diffusion.size())
      throw CoefficientError("triangle region id " + std::to_string(t.region) +
                             " has no coefficient entry");
    if (coefficients.reaction[t.region] > 0.0) used_reaction_positive = true;
  }

  if (!(theta > 0.0) || theta > 1.0) throw ConfigError("theta must lie in (0, 1]");
  if (!(err_tol > 0.0)) throw ConfigError("errtol must be positive");
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(trust_factor > 0.0)) throw ConfigError("trust factor must be positive");

  const bool dirichlet = mesh.has_dirichlet();
  const bool neumann = mesh.has_neumann();
  switch (kind) {
    case ProblemKind::Friedrichs:
      if (coefficients.robin_alpha != 0.0)
        throw ConfigError("friedrichs kind requires zero boundary coefficient");
      if (!dirichlet && !used_reaction_positive)
        throw ConfigError("friedrichs kind needs a Dirichlet part or positive reaction (operator not coercive)");
      break;
    case ProblemKind::Poincare:
      if (dirichlet) throw ConfigError("poincare kind requires an all-Neumann boundary");
      if (used_reaction_positive) throw ConfigError("poincare kind requires zero reaction");
      if (coefficients.robin_alpha != 0.0)
        throw ConfigError("poincare kind requires zero boundary coefficient");
      break;
    case ProblemKind::Trace:
      if (!neumann) throw ConfigError("trace kind needs a Neumann boundary part");
      if (coefficients.robin_alpha < 0.0) throw ConfigError("boundary coefficient must be nonnegative");
      if (!dirichlet && !used_reaction_positive && !(coefficients.robin_alpha > 0.0))
        throw ConfigError("trace kind needs a Dirichlet part, positive reaction or positive boundary coefficient");
      if (!friedrichs_upper.has_value() || !(*friedrichs_upper > 0.0))
        throw ConfigError("trace kind needs a positive certified Friedrichs upper bound");
      break;
  }
}

}  // namespace eigenbound
