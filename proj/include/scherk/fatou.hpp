#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scherk/solver.hpp"

namespace scherk {

// eta(x) = (1 + tanh(x/2)) / 2 with range (0, 1); the negative kind is eta - 1.
struct Compression {
    enum class Kind { positive, negative };
    Kind kind = Kind::positive;

    double eta(double x) const;
    double eta_prime(double x) const;  // sech^2(x/2) / 4 for both kinds
    double lower() const { return kind == Kind::positive ? 0.0 : -1.0; }
    double upper() const { return kind == Kind::positive ? 1.0 : 0.0; }
};

struct HypothesisReport {
    // a) metric bounds of the polar density on the annulus
    double rho_lo = 0.5;
    double rho_hi = 1.0;
    double alpha_lo = 0.0;
    double beta_hi = 0.0;
    bool verdict_a = false;
    // b) flux bound
    double flux_bound = 0.0;     // M = max |X_u| over quadrature points
    double declared_bound = 0.0;  // 1 for bounded-flux operators, +inf otherwise
    bool verdict_b = false;
    // c) coercivity g(grad u, X_u) >= delta |grad u| + h
    double delta = 0.0;
    double coercivity_min = 0.0;  // min of g(grad u, X_u) - delta |grad u| - h
    double h_integral = 0.0;      // int |h| dA
    double h_sup = 0.0;
    double f_integral = 0.0;      // int |f| dA
    double area = 0.0;
    double w_margin = 0.0;        // min of W - delta |grad u| (bounded-flux operators)
    double identity_error = 0.0;  // max |g(grad u, X_u) - (W + h)|
    bool verdict_c = false;
    std::size_t quadrature_points = 0;
};

// Pointwise h of the coercivity inequality for the given operator.
double coercivity_h(const OperatorSpec& op, Vec2 x, Vec2 grad, double delta);

HypothesisReport check_hypotheses(const Field& field, double delta, double rho_lo = 0.5, double rho_hi = 1.0);

// psi = eta(u) with |grad psi| = eta'(u) |grad u|.
class CompressedField {
public:
    CompressedField(const Field& field, Compression c);

    const Mesh& mesh() const { return field_->mesh(); }
    const Compression& compression() const { return c_; }
    const std::vector<double>& values() const { return psi_; }
    const std::vector<double>& gradient_norms() const { return grad_norm_; }  // per triangle, at the centroid
    std::optional<double> value_at(Vec2 p) const;
    // |grad psi| at a point of triangle t.
    double gradient_norm(std::size_t t, Vec2 x) const;

private:
    std::shared_ptr<const Field> field_;
    Compression c_;
    std::vector<double> psi_;
    std::vector<double> grad_norm_;
};

CompressedField compress(const Field& field, Compression c = {});

// Integrals of |grad psi| dA (metric norm and area) over the parts of the
// domain inside the geodesic balls B(r_j); r_j are fractions of the unit
// geodesic radius.
std::vector<double> tv_integral(const CompressedField& psi, const std::vector<double>& radii);

enum class RayClass { finite, plus_inf, minus_inf, undetermined };

const char* to_string(RayClass c);

struct RayParams {
    int samples = 8;                // K
    std::optional<double> t_high;   // default 0.8 cap, or +inf without a cap
    double eps_tail = 0.05;
};

struct RayTrace {
    double theta = 0.0;
    double exit_distance = 0.0;  // geodesic distance from the origin to the domain boundary
    std::vector<double> radii;   // fractions 1 - 2^-k of the exit distance
    std::vector<double> values;
    RayClass cls = RayClass::undetermined;
    double limit = 0.0;          // last sample, meaningful for finite rays
    bool truncated = false;
};

using ScalarSampler = std::function<std::optional<double>(Vec2)>;

// Geodesic distance from the origin to the mesh boundary along direction theta.
double ray_exit_distance(const Mesh& mesh, double theta);

RayTrace trace_and_classify(const Mesh& mesh, const ScalarSampler& sample, double theta, const RayParams& params,
                            double t_high_default);
RayTrace trace_and_classify(const Field& field, double theta, const RayParams& params = {});
RayTrace trace_and_classify(const CompressedField& psi, double theta, const RayParams& params = {});

// Classification rule applied to the sampled values.
RayClass classify(const std::vector<double>& values, double t_high, double eps_tail);

struct FatouReport {
    int n_rays = 0;
    double mu_finite = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double mu_und = 0.0;
    std::vector<RayTrace> rays;
};

FatouReport fatou_report(const Field& field, int n_rays, const RayParams& params = {});

}  // namespace scherk
