#include "oppenheim/sampler.hpp"

#include "oppenheim/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace oppenheim {

std::string to_string(Backend backend) { return backend == Backend::exact ? "exact" : "lattice"; }

Backend parse_backend(const std::string& name) {
    if (name == "exact") return Backend::exact;
    if (name == "lattice") return Backend::lattice;
    throw ConfigError("unknown backend '" + name + "' (expected exact|lattice)");
}

// ---------------------------------------------------------------------------
// UniformStream

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t path_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_id), static_cast<std::uint32_t>(path_id >> 32),
                      0x6f707065u};
    engine_.seed(seq);
}

std::uint64_t UniformStream::next_mantissa() {
    std::uint64_t a = 0;
    while (a == 0) a = engine_() >> 11;
    return a;
}

Rational UniformStream::next_rational() {
    Rational u(BigInt(static_cast<unsigned long>(next_mantissa())), BigInt(1) << 53);
    u.canonicalize();
    return u;
}

// ---------------------------------------------------------------------------
// Digit sampling

namespace {

void check_uniform(const Rational& u) {
    if (u <= 0 || u > 1) throw DomainError("uniform variate must lie in (0, 1]");
}

void check_cap(const BigInt& k, const std::optional<BigInt>& cap) {
    if (cap && k > *cap) throw CapExceeded("sampled digit exceeds cap " + to_string(*cap));
}

} // namespace

BigInt sample_digit_search(const DigitLaw& law, const Rational& u, const std::optional<BigInt>& cap) {
    check_uniform(u);
    // Invariant: survival(lo) >= u > survival(hi).
    BigInt lo = law.k_min();
    if (law.survival_geq(lo) < u) {
        // Only possible for a mass-deficient law.
        throw ImproperModel("survival at k_min is below the uniform variate");
    }
    BigInt step = 1;
    BigInt hi = lo + step;
    while (law.survival_geq(hi) >= u) {
        if (cap && hi > *cap) throw CapExceeded("sampled digit exceeds cap " + to_string(*cap));
        lo = hi;
        step *= 2;
        hi = lo + step;
    }
    while (hi - lo > 1) {
        BigInt mid = lo + (hi - lo) / 2;
        if (law.survival_geq(mid) >= u) lo = std::move(mid);
        else hi = std::move(mid);
    }
    check_cap(lo, cap);
    return lo;
}

BigInt sample_digit(const DigitLaw& law, const Rational& u, const std::optional<BigInt>& cap) {
    check_uniform(u);
    if (!law.cdf().is_linear()) return sample_digit_search(law, u, cap);
    // F(t) = t: delta(k) >= u  <=>  k <= phi (1 + q) / u - phi q.
    BigInt k;
    if (law.q() == 0) {
        const BigInt num = law.phi().get_num() * u.get_den();
        const BigInt den = law.phi().get_den() * u.get_num();
        mpz_fdiv_q(k.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    } else {
        k = floor(law.phi() * (1 + law.q()) / u - law.phi() * law.q());
    }
    if (k < law.k_min()) k = law.k_min();
    check_cap(k, cap);
    return k;
}

BigInt sample_digit(const OppenheimModel& model, std::size_t n, const BigInt& h, const Rational& u) {
    return sample_digit(digit_law(model, n, h), u);
}

// ---------------------------------------------------------------------------
// LatticeLaw

LatticeLaw::LatticeLaw(std::shared_ptr<const OppenheimModel> model) : model_(std::move(model)) {
    if (!model_->lattice) throw CertificationMissing("lattice backend needs a good sequence attached to the model");
    certificate_ = certify_lattice(*model_, *model_->lattice);
    if (!certificate_.certified) throw CertificationMissing("lattice integrality check failed: " + certificate_.detail);
    require_proper(*model_);
}

std::int64_t LatticeLaw::sample(std::size_t n, double u) const {
    const Cdf& f = model_->dist.at(n);
    const GoodSequence& lat = lattice();
    if (!(f.is_linear() && lat.kind() == GoodSequence::Kind::arithmetic)) return sample_search(n, u);
    // CDF(s) = 1 - 1/(kappa (s+1)) >= u  <=>  s + 1 >= 1 / (kappa (1 - u)).
    const double w = 1.0 - u;
    const double kappa = static_cast<double>(lat.kappa());
    const double s1 = std::ceil(1.0 / (kappa * w));
    const auto s = s1 < 1.0 ? std::int64_t{0} : static_cast<std::int64_t>(s1) - 1;
    return lat.kappa() * s;
}

std::int64_t LatticeLaw::sample_search(std::size_t n, double u) const {
    const Cdf& f = model_->dist.at(n);
    const GoodSequence& lat = lattice();
    const double w = 1.0 - u;
    // Smallest j >= 1 with F(1/lambda_j) <= w; the value is lambda_{j-1}.
    auto survival = [&](std::int64_t j) { return f(1.0 / static_cast<double>(lat[j])); };
    if (survival(1) <= w) return 0;
    std::int64_t lo = 1;
    std::int64_t hi = 2;
    while (survival(hi) > w) {
        lo = hi;
        if (hi > (std::int64_t{1} << 56) / std::max<std::int64_t>(lat.gap_bound(), 1))
            throw CapExceeded("lattice inversion ran past the int64 range");
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (survival(mid) <= w) hi = mid;
        else lo = mid;
    }
    return lat[hi - 1];
}

// ---------------------------------------------------------------------------
// Envelope

Envelope exact_envelope(const OppenheimModel& model) {
    const PhiFamily& phi = model.phi;
    if (phi.kind() == PhiFamily::Kind::power_sum) {
        if (phi.m() >= 2)
            return {30, "power-sum phi with m >= 2: digit bit-length doubles every step"};
        if (phi.m() == 1)
            return {100000, "power-sum phi with m = 1 (Engel-type): bit-length grows linearly, total cost quadratic"};
    }
    return {std::nullopt, "digits do not accumulate; no length limit"};
}

void check_envelope(const OppenheimModel& model, Backend backend, std::uint64_t n) {
    if (backend != Backend::exact) return;
    const Envelope env = exact_envelope(model);
    if (env.max_n && n > *env.max_n) {
        throw CapExceeded("n = " + std::to_string(n) + " is outside the exact-backend envelope (n <= " +
                          std::to_string(*env.max_n) + "; " + env.reason +
                          "); use --backend lattice for large-n runs");
    }
}

// ---------------------------------------------------------------------------
// Sampler and PathStream

Sampler::Sampler(std::shared_ptr<const OppenheimModel> model, Backend backend)
    : model_(std::move(model)), backend_(backend) {
    if (!model_) throw ConfigError("sampler needs a model");
    if (backend_ == Backend::lattice) lattice_law_ = std::make_unique<LatticeLaw>(model_);
    else require_proper(*model_);
}

PathStream::PathStream(std::shared_ptr<const Sampler> sampler, std::uint64_t seed, std::uint64_t path_id)
    : sampler_(std::move(sampler)), seed_(seed), path_id_(path_id), rng_(seed, path_id) {}

PathStream PathStream::scripted(std::shared_ptr<const Sampler> sampler, std::vector<Rational> uniforms) {
    PathStream s(std::move(sampler), 0, 0);
    s.script_ = std::move(uniforms);
    return s;
}

Rational PathStream::draw_rational() {
    if (script_) return script_->at(script_pos_++);
    return rng_.next_rational();
}

double PathStream::draw_double() {
    if (script_) return to_double(script_->at(script_pos_++));
    return rng_.next();
}

void PathStream::initialize_digit() {
    const OppenheimModel& model = sampler_->model();
    if (model.initial.rule == InitialDigit::Rule::fixed) digit_ = model.initial.value;
    else digit_ = sample_digit(initial_digit_law(model), draw_rational(), cap_);
    started_ = true;
}

const PathStream::Step& PathStream::next() {
    if (backend() != Backend::exact) throw std::logic_error("PathStream::next needs the exact backend");
    if (!started_) initialize_digit();
    const OppenheimModel& model = sampler_->model();
    const std::size_t n = n_;
    Rational phi = model.phi(n, digit_);
    Rational q = model.q(n);
    const DigitLaw law(std::move(phi), std::move(q), model.dist.at(n));
    // Integer phi with a validated F gives mass F(1) = 1; only fractional phi needs the check.
    if (!is_integer(law.phi()) && !law.proper())
        throw ImproperModel("conditional digit law at n = " + std::to_string(n) + " has mass < 1");
    BigInt k = sample_digit(law, draw_rational(), cap_);
    step_.n = n;
    step_.ratio = (k + law.phi() * law.q()) / (law.phi() * (1 + law.q()));
    step_.value = to_double(step_.ratio);
    step_.digit = k;
    digit_ = std::move(k);
    ++n_;
    return step_;
}

double PathStream::next_lattice() {
    const LatticeLaw* law = sampler_->lattice_law();
    if (law == nullptr) throw std::logic_error("PathStream::next_lattice needs the lattice backend");
    const auto value = law->sample(n_, draw_double());
    ++n_;
    return static_cast<double>(value);
}

double PathStream::next_value() { return backend() == Backend::exact ? next().value : next_lattice(); }

PathStream spawn(std::uint64_t seed, std::uint64_t path_id, std::shared_ptr<const OppenheimModel> model,
                 Backend backend) {
    return PathStream(std::make_shared<const Sampler>(std::move(model), backend), seed, path_id);
}

} // namespace oppenheim
