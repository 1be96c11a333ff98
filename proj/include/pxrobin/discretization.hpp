#pragma once

#include <memory>
#include <string>

#include "pxrobin/error.hpp"
#include "pxrobin/fem.hpp"
#include "pxrobin/problem.hpp"

namespace pxrobin {

/// A validated ProblemSpec bound to its mesh, with every field sampled at the
/// quadrature points. Cheap to copy (the mesh is shared).
class Discretization {
 public:
  /// Throws ValidationError listing every violated hypothesis.
  explicit Discretization(ProblemSpec spec, std::shared_ptr<const Mesh> mesh = nullptr)
      : spec_(std::move(spec)),
        space_(std::make_shared<const FeSpace>(mesh ? std::move(mesh) : spec_.build_mesh())) {
    auto v = validate_spec(spec_, *space_);
    if (!v.ok()) {
      std::string msg = "problem data violates standing hypotheses:";
      for (const auto& x : v.violations) msg += "\n  " + x.hypothesis + " (" + x.detail + ")";
      throw ValidationError(msg);
    }
    report_ = *v.report;
    a_ = space_->sample(spec_.a);
    b_ = space_->sample(spec_.b);
    p_ = space_->sample(spec_.p);
    q_ = space_->sample(spec_.q);
    beta_ = space_->sample(spec_.beta);
    lambda_ = spec_.lambda;
    eps_ = report_.p_minus < 2.0 ? 1e-10 : 0.0;
  }

  const ProblemSpec& spec() const noexcept { return spec_; }
  const FeSpace& space() const noexcept { return *space_; }
  const Mesh& mesh() const noexcept { return space_->mesh(); }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return space_->mesh_ptr(); }
  Eigen::Index size() const noexcept { return space_->size(); }
  const RegimeReport& regime() const noexcept { return report_; }

  const SampledField& a() const noexcept { return a_; }
  const SampledField& b() const noexcept { return b_; }
  const SampledField& p() const noexcept { return p_; }
  const SampledField& q() const noexcept { return q_; }
  const SampledField& beta() const noexcept { return beta_; }
  double lambda() const noexcept { return lambda_; }

  /// Smoothing of |grad u| near zero; nonzero only when p- < 2.
  double eps() const noexcept { return eps_; }

  Discretization with_lambda(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    Discretization d = *this;
    d.lambda_ = lambda;
    d.spec_.lambda = lambda;
    return d;
  }

  Discretization with_eps(double eps) const {
    if (eps < 0.0) throw InvalidArgument("eps must be nonnegative");
    if (report_.p_minus < 2.0 && !(eps > 0.0)) throw InvalidArgument("eps must be positive when p- < 2");
    Discretization d = *this;
    d.eps_ = eps;
    return d;
  }

  DiscreteFunction function(NodalVector v) const { return DiscreteFunction(mesh_ptr(), std::move(v)); }

 private:
  ProblemSpec spec_;
  std::shared_ptr<const FeSpace> space_;
  RegimeReport report_;
  SampledField a_, b_, p_, q_, beta_;
  double lambda_ = 1.0;
  double eps_ = 0.0;
};

}  // namespace pxrobin
