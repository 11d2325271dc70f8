#include "thinobs/closed_forms.hpp"

#include <cmath>
#include <string>

#include "thinobs/spectral.hpp"

namespace thinobs {

FracOrder::FracOrder(double s) : s_(s) {
  if (!std::isfinite(s) || s <= 0.0 || s >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "fractional order must lie in (0,1), got " + std::to_string(s));
}

void HalfPoint::validate() const {
  if (!(x_np1 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x_{n+1} must be nonnegative");
}

double eval_w0s(FracOrder s, const HalfPoint& p) { return w0s_t<double>(s, p.x_n, p.x_np1); }

double eval_w1s(FracOrder s, const HalfPoint& p) { return w1s_t<double>(s, p.x_n, p.x_np1); }

double eval_v_model(FracOrder s, double y_n, double y_np1) {
  if (y_n < 0.0 || y_np1 < 0.0) throw Error(ErrorCode::InvalidArgument, "quarter-space point required");
  return v_model_t<double>(s, y_n, y_np1);
}

W1sGradient grad_w1s(FracOrder s, const HalfPoint& p) {
  if (p.x_np1 == 0.0 && p.x_n <= 0.0)
    throw Error(ErrorCode::DegeneratePoint, "weighted normal derivative on the contact ray");
  const double sv = s;
  const double dn = kCs * w0s_t<double>(sv, p.x_n, p.x_np1);
  const double wn = kCs * (sv / (sv - 1.0)) * w0s_t<double>(1.0 - sv, -p.x_n, p.x_np1);
  return {dn, wn};
}

double thin_flux_w1s(FracOrder s, double x_n) {
  const double sv = s;
  return kCs * (sv / (sv - 1.0)) * w0s_t<double>(1.0 - sv, -x_n, 0.0);
}

double apply_Ls(const Jet3& u, double xp, double s) {
  return std::pow(xp, 1.0 - 2.0 * s) * u.laplacian() + (1.0 - 2.0 * s) * std::pow(xp, -2.0 * s) * u.g[kVert];
}

ClosedFormField::ClosedFormField(Kind kind, FracOrder s) : kind_(kind), s_(s) {}

ClosedFormField& ClosedFormField::with_tau(double tau) {
  tau_ = tau;
  return *this;
}

ClosedFormField& ClosedFormField::with_mode(int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "mode index must be nonnegative");
  k_ = k;
  mode_coeffs_ = hypergeom_coeffs(k, s_);
  return *this;
}

ClosedFormField& ClosedFormField::with_shift(std::vector<double> x0_tan, double x0_n) {
  if (x0_tan.size() > 1) throw Error(ErrorCode::InvalidArgument, "at most one tangential coordinate");
  shift_tan_ = x0_tan.empty() ? 0.0 : x0_tan[0];
  shift_n_ = x0_n;
  return *this;
}

ClosedFormField& ClosedFormField::with_rotation(std::vector<double> nu) {
  if (nu.empty() || nu.size() > 2) throw Error(ErrorCode::InvalidArgument, "rotation vector has 1 or 2 entries");
  const double nt = nu.size() == 2 ? nu[0] : 0.0;
  const double nn = nu.back();
  const double len = std::hypot(nt, nn);
  if (std::abs(len - 1.0) > 1e-12 || nn <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "rotation must be a unit vector with positive e_n component");
  nu_tan_ = nt;
  nu_n_ = nn;
  return *this;
}

template <class T>
T ClosedFormField::eval(const T& x1, const T& xn, const T& xp) const {
  const T q = (x1 - shift_tan_) * nu_tan_ + (xn - shift_n_) * nu_n_;
  switch (kind_) {
    case Kind::W0S: return w0s_t(s_, q, xp);
    case Kind::W1S: return w1s_t(s_, q, xp);
    case Kind::W0S_POWER: {
      const T w = w0s_t(s_, q, xp);
      if (value_of(w) == 0.0) return T(0.0);
      return pow(w, 1.0 + tau_);
    }
    case Kind::V_MODEL: return v_model_t(s_, q, xp);
    case Kind::EIGENMODE: return eval_mode_2d_t(k_, s_, mode_coeffs_, q, xp);
  }
  return T(0.0);
}

template double ClosedFormField::eval<double>(const double&, const double&, const double&) const;
template Jet3 ClosedFormField::eval<Jet3>(const Jet3&, const Jet3&, const Jet3&) const;

double ClosedFormField::operator()(const HalfPoint& p) const {
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  return eval<double>(x1, p.x_n, p.x_np1);
}

Jet3 ClosedFormField::jet(const HalfPoint& p) const {
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  return eval<Jet3>(Jet3::variable(x1, kTan), Jet3::variable(p.x_n, kNor), Jet3::variable(p.x_np1, kVert));
}

ReducedInhomogeneity reduce_inhomogeneity(FracOrder s, const InhomogeneityField& ft, const HalfPoint& p) {
  if (!ft.value || !ft.dnp1 || !ft.lap_tan || !ft.lap_tan_dnp1)
    throw Error(ErrorCode::MissingDerivative, "need value, d_{n+1}, tangential Laplacian and its normal derivative");
  const double sv = s;
  HalfPoint thin = p;
  thin.x_np1 = 0.0;
  const double t = p.x_np1;
  const double f0 = ft.value(thin);
  const double f1 = ft.dnp1(thin);
  const double c2 = 1.0 / (2.0 * (2.0 - 2.0 * sv));
  const double c3 = 1.0 / (3.0 * (3.0 - 2.0 * sv));
  const double offset = c2 * f0 * t * t + c3 * f1 * t * t * t;
  double taylor;
  if (t > 0.0) {
    taylor = (ft.value(p) - f0 - f1 * t) / (t * t);
  } else {
    if (!ft.d2np1) throw Error(ErrorCode::MissingDerivative, "second normal derivative needed on the thin space");
    taylor = 0.5 * ft.d2np1(thin);
  }
  const double f = taylor - c2 * ft.lap_tan(thin) - c3 * ft.lap_tan_dnp1(thin) * t;
  return {offset, f};
}

namespace {

HalfPoint affine(const HalfPoint& x0, double lambda, const HalfPoint& p) {
  HalfPoint q;
  q.x_tan.resize(p.x_tan.size());
  for (std::size_t i = 0; i < p.x_tan.size(); ++i)
    q.x_tan[i] = (i < x0.x_tan.size() ? x0.x_tan[i] : 0.0) + lambda * p.x_tan[i];
  q.x_n = x0.x_n + lambda * p.x_n;
  q.x_np1 = lambda * p.x_np1;
  return q;
}

double norm(const HalfPoint& p) {
  double t = p.x_n * p.x_n + p.x_np1 * p.x_np1;
  for (double v : p.x_tan) t += v * v;
  return std::sqrt(t);
}

void check_rescale(double c, double lambda, const HalfPoint& x0) {
  if (!(c > 0.0) || !(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "c and lambda must be positive");
  if (x0.x_np1 != 0.0) throw Error(ErrorCode::InvalidArgument, "x0 must lie on the thin space");
}

}  // namespace

Field rescale_solution(const Field& w, double c, double lambda, const HalfPoint& x0) {
  check_rescale(c, lambda, x0);
  const double shift = norm(x0);
  Field out;
  out.domain_radius = (w.domain_radius - shift) / lambda;
  out.eval = [w, c, lambda, x0](const HalfPoint& p) {
    const HalfPoint q = affine(x0, lambda, p);
    if (norm(q) > w.domain_radius) throw Error(ErrorCode::OutOfDomain, "rescaled point leaves the domain");
    return c * w.eval(q);
  };
  return out;
}

Field rescale_inhomogeneity(const Field& f, double c, double lambda, const HalfPoint& x0) {
  check_rescale(c, lambda, x0);
  Field out;
  out.domain_radius = (f.domain_radius - norm(x0)) / lambda;
  out.eval = [f, c, lambda, x0](const HalfPoint& p) {
    const HalfPoint q = affine(x0, lambda, p);
    if (norm(q) > f.domain_radius) throw Error(ErrorCode::OutOfDomain, "rescaled point leaves the domain");
    return c * lambda * lambda * f.eval(q);
  };
  return out;
}

}  // namespace thinobs
