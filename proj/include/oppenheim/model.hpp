#pragma once

#include "oppenheim/lattice.hpp"
#include "oppenheim/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oppenheim {

/// The digit-growth functions phi_n : N* -> Q+.
class PhiFamily {
public:
    enum class Kind { constant, power_sum, reciprocal_periodic };

    static PhiFamily constant(Rational c);
    /// phi(h) = sum_{k=k0}^{m} h^k with k0 = 0 when include_zero_term, else 1.
    static PhiFamily power_sum(unsigned m, bool include_zero_term);
    /// phi_{kp+j-1} = 1/a_j for k >= 0, j = 1..p.
    static PhiFamily reciprocal_periodic(std::vector<std::int64_t> periods);

    static PhiFamily luroth() { return power_sum(0, true); }
    static PhiFamily engel() { return power_sum(1, false); }
    static PhiFamily sylvester() { return power_sum(2, false); }

    Rational operator()(std::size_t n, const BigInt& h) const;

    Kind kind() const noexcept { return kind_; }
    const Rational& constant_value() const noexcept { return constant_; }
    unsigned m() const noexcept { return m_; }
    bool include_zero_term() const noexcept { return include_zero_; }
    const std::vector<std::int64_t>& periods() const noexcept { return periods_; }
    /// L.C.M. of the periods (1 for the other kinds).
    std::int64_t kappa() const;
    /// Number of positions after which phi_n repeats.
    std::size_t period() const noexcept { return periods_.empty() ? 1 : periods_.size(); }

private:
    PhiFamily() = default;

    Kind kind_ = Kind::constant;
    Rational constant_{1};
    unsigned m_ = 0;
    bool include_zero_ = true;
    std::vector<std::int64_t> periods_;
};

/// A distribution function on [0,1]. Evaluation is exact on rationals.
class Cdf {
public:
    enum class Kind { linear, polynomial, piecewise_linear };

    struct Knot {
        Rational t;
        Rational value;
    };

    /// F(t) ~ coefficient * t^exponent as t -> 0; exponent 0 means F vanishes near 0.
    struct Leading {
        double coefficient;
        unsigned exponent;
    };

    static Cdf linear();
    /// F(t) = sum_i coefficients[i] t^i.
    static Cdf polynomial(std::vector<Rational> coefficients);
    /// Linear interpolation; the first knot must sit at t = 0 and the last at t = 1.
    static Cdf piecewise_linear(std::vector<Knot> knots);

    /// Arguments are clamped to [0,1].
    Rational operator()(const Rational& t) const;
    double operator()(double t) const;

    Kind kind() const noexcept { return kind_; }
    bool is_linear() const noexcept { return kind_ == Kind::linear; }
    const std::vector<Rational>& coefficients() const noexcept { return coefficients_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }

    /// lim_{t->0} F(t)/t (infinite when F(0) != 0).
    double alpha_limit() const;
    /// limsup_{t->0} F(t)/t. Equal to alpha_limit for every supported kind.
    double ratio_bound() const;
    /// An upper bound on sup_{0 < t <= t_max} F(t)/t.
    double ratio_sup(double t_max) const;
    Leading leading() const;

private:
    Cdf() = default;

    Kind kind_ = Kind::linear;
    std::vector<Rational> coefficients_;
    std::vector<double> coefficients_d_;
    std::vector<Knot> knots_;
    std::vector<double> knot_t_d_, knot_v_d_;
};

/// The sequence (F_n): either one shared F, or a list cycled over positions
/// (F_n = list[(n-1) mod size], F_0 = list[0]).
class DistributionFamily {
public:
    explicit DistributionFamily(Cdf shared);
    explicit DistributionFamily(std::vector<Cdf> per_index);

    const Cdf& at(std::size_t n) const;
    bool identical() const noexcept { return members_.size() == 1; }
    const std::vector<Cdf>& members() const noexcept { return members_; }
    std::size_t period() const noexcept { return members_.size(); }

    /// sup_n limsup_{t->0} F_n(t)/t.
    double ratio_bound() const;
    /// alpha_limit of the shared F; NaN for indexed families.
    double alpha_limit() const;

private:
    std::vector<Cdf> members_;
};

/// The sequence q_n (implemented kinds depend on n only).
class QSpec {
public:
    enum class Kind { zero, constant, lattice_periodic };

    static QSpec zero();
    static QSpec constant(Rational c);
    /// q_n = values[(n-1) mod size]; the values are meant to lie in the attached good sequence.
    static QSpec lattice_periodic(std::vector<std::int64_t> values);

    /// q_0 = 0.
    Rational operator()(std::size_t n) const;

    Kind kind() const noexcept { return kind_; }
    const Rational& constant_value() const noexcept { return constant_; }
    const std::vector<std::int64_t>& values() const noexcept { return values_; }
    std::size_t period() const noexcept { return values_.empty() ? 1 : values_.size(); }

private:
    QSpec() = default;

    Kind kind_ = Kind::zero;
    Rational constant_{0};
    std::vector<std::int64_t> values_;
};

struct InitialDigit {
    enum class Rule { virtual_zeroth, fixed };
    Rule rule = Rule::virtual_zeroth;
    BigInt value{1};

    static InitialDigit virtual_zeroth() { return {}; }
    static InitialDigit fixed(BigInt h) { return {Rule::fixed, std::move(h)}; }
};

struct OppenheimModel {
    PhiFamily phi = PhiFamily::luroth();
    DistributionFamily dist{Cdf::linear()};
    QSpec q = QSpec::zero();
    InitialDigit initial;
    std::optional<GoodSequence> lattice;

    /// Number of positions after which (phi_n, F_n, q_n) repeats.
    std::size_t period() const;
};

/// Lüroth (phi == 1), Engel (phi(h) = h) and the power-sum m = 2 model
/// (phi(h) = h + h^2), all with F(t) = t, q == 0 and Lambda = N*.
OppenheimModel luroth_model();
OppenheimModel engel_model();
OppenheimModel sylvester_model();

Rational phi_eval(const OppenheimModel& model, std::size_t n, const BigInt& h);

/// delta = phi (1 + q) / (k + phi q). Throws DomainError when k < phi.
Rational delta(const Rational& phi, const Rational& k, const Rational& q);
Rational delta(const OppenheimModel& model, std::size_t j, const BigInt& h, const Rational& k,
               const Rational& q);

/// R = (k + phi q) / (phi (1 + q)) = 1 / delta.
Rational r_value(const OppenheimModel& model, std::size_t n, const BigInt& h, const BigInt& k,
                 const Rational& q);

/// The conditional law P(B_{n+1} = k | B_n = h) = F(delta(h,k,q)) - F(delta(h,k+1,q)), k >= k_min.
///
/// A DigitLaw borrows the Cdf it was built from; it must not outlive the model.
class DigitLaw {
public:
    DigitLaw(Rational phi, Rational q, const Cdf& cdf);

    const BigInt& k_min() const noexcept { return k_min_; }
    const Rational& phi() const noexcept { return phi_; }
    const Rational& q() const noexcept { return q_; }
    const Cdf& cdf() const noexcept { return *cdf_; }

    /// P(B_{n+1} >= k); equals 1 below k_min.
    Rational survival_geq(const BigInt& k) const;
    Rational mass(const BigInt& k) const;
    /// survival_geq(k_min) == 1.
    bool proper() const;

private:
    Rational phi_;
    Rational q_;
    const Cdf* cdf_;
    BigInt k_min_;
};

/// Throws ImproperModel when the law's total mass is below 1.
DigitLaw digit_law(const OppenheimModel& model, std::size_t n, const BigInt& h);
/// Law of B_1 under the virtual zeroth digit rule (phi_0 == 1, q_0 = 0, F_0 = F_1).
DigitLaw initial_digit_law(const OppenheimModel& model);

/// True iff x phi_n(h) + (x - 1) q_n phi_n(h) is an integer. Throws DomainError when x is not in the lattice.
bool lattice_integrality_check(const OppenheimModel& model, const GoodSequence& lattice, std::int64_t x,
                               const BigInt& h, std::size_t n);

struct LatticeCertificate {
    bool certified = false;
    std::string detail;
};

/// Runs lattice_integrality_check over a probe set of positions, states and lattice points.
LatticeCertificate certify_lattice(const OppenheimModel& model, const GoodSequence& lattice);

enum class DensityConvention {
    /// P(T = lambda_s) = F(1/lambda_s) - F(1/lambda_{s+1}), s >= 0 (floor discretization).
    floor,
    /// F(1/lambda_{s-1}) - F(1/lambda_s), s >= 1, as literally stated for the ceiling discretization.
    paper
};

/// F(1/lambda) with F(1/0) := 1.
Rational survival_at_lattice(const Cdf& cdf, std::int64_t lambda);

Rational t_density(const OppenheimModel& model, const GoodSequence& lattice, std::int64_t s,
                   DensityConvention convention = DensityConvention::floor, std::size_t n = 1);

struct ValidationReport {
    struct Finding {
        std::string check;
        bool pass;
        std::string detail;
    };
    std::vector<Finding> findings;

    bool ok() const;
    /// CDFs valid and every probed conditional law carries mass 1.
    bool proper() const;
    const Finding* find(const std::string& check) const;
};

/// Never throws; returns one finding per check.
ValidationReport validate_model(const OppenheimModel& model);

/// Throws ImproperModel (mass deficiency) or ConfigError (other failed checks).
void require_proper(const OppenheimModel& model);

} // namespace oppenheim
