#pragma once

#include "oppenheim/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oppenheim {

enum class Backend { exact, lattice };

std::string to_string(Backend backend);
Backend parse_backend(const std::string& name);

/// Per-path uniform source. (seed, path_id) seeds an independent mt19937_64
/// through std::seed_seq; draws are dyadic a / 2^53 with a in [1, 2^53), so
/// u = 0 is redrawn and u = 1 never occurs.
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t path_id);

    std::uint64_t next_mantissa();
    double next() { return static_cast<double>(next_mantissa()) * 0x1p-53; }
    Rational next_rational();

private:
    std::mt19937_64 engine_;
};

/// The unique k >= k_min with F(delta(h,k+1,q)) < u <= F(delta(h,k,q)).
/// Closed form for linear F, galloping + binary search otherwise.
/// Throws CapExceeded when the digit would exceed `cap`.
BigInt sample_digit(const DigitLaw& law, const Rational& u, const std::optional<BigInt>& cap = std::nullopt);
/// Always uses the search path (galloping + bisection on the survival function).
BigInt sample_digit_search(const DigitLaw& law, const Rational& u, const std::optional<BigInt>& cap = std::nullopt);
BigInt sample_digit(const OppenheimModel& model, std::size_t n, const BigInt& h, const Rational& u);

/// Law of the floor-discretized ratios on the model's good sequence. Building
/// one certifies the model/lattice pair; throws CertificationMissing when the
/// certificate fails or no lattice is attached, ImproperModel for mass-deficient models.
class LatticeLaw {
public:
    explicit LatticeLaw(std::shared_ptr<const OppenheimModel> model);

    const GoodSequence& lattice() const noexcept { return *model_->lattice; }
    const OppenheimModel& model() const noexcept { return *model_; }
    const LatticeCertificate& certificate() const noexcept { return certificate_; }

    /// Inverse CDF over the masses t_density(s), s = 0, 1, ...: the smallest
    /// lattice value whose cumulative mass reaches u.
    std::int64_t sample(std::size_t n, double u) const;
    std::int64_t sample_search(std::size_t n, double u) const;

private:
    std::shared_ptr<const OppenheimModel> model_;
    LatticeCertificate certificate_;
};

/// Exact backend feasibility: largest n for which digit sizes stay tractable.
struct Envelope {
    std::optional<std::uint64_t> max_n;
    std::string reason;
};
Envelope exact_envelope(const OppenheimModel& model);
/// Throws CapExceeded with guidance when an exact-backend run of length n is outside the envelope.
void check_envelope(const OppenheimModel& model, Backend backend, std::uint64_t n);

/// Validated sampling context for one (model, backend) pair: the model is
/// checked for properness once, and for the lattice backend certified once.
/// Streams spawned from a Sampler share it read-only.
class Sampler {
public:
    Sampler(std::shared_ptr<const OppenheimModel> model, Backend backend);

    const OppenheimModel& model() const noexcept { return *model_; }
    std::shared_ptr<const OppenheimModel> model_ptr() const noexcept { return model_; }
    Backend backend() const noexcept { return backend_; }
    /// Null for the exact backend.
    const LatticeLaw* lattice_law() const noexcept { return lattice_law_.get(); }

private:
    std::shared_ptr<const OppenheimModel> model_;
    Backend backend_;
    std::unique_ptr<LatticeLaw> lattice_law_;
};

/// One trajectory. Exact backend: digits B_n as big integers, ratios R_n as
/// exact rationals. Lattice backend: iid floor-discretized ratios.
class PathStream {
public:
    struct Step {
        std::size_t n = 0;
        BigInt digit;     ///< B_{n+1}
        Rational ratio;   ///< R_n exact
        double value = 0; ///< R_n truncated to double
    };

    PathStream(std::shared_ptr<const Sampler> sampler, std::uint64_t seed, std::uint64_t path_id);

    /// Replays a fixed list of uniforms instead of the generator; throws
    /// std::out_of_range when the list runs out.
    static PathStream scripted(std::shared_ptr<const Sampler> sampler, std::vector<Rational> uniforms);

    /// Exact backend only: advances to (B_{n+1}, R_n).
    const Step& next();
    /// Lattice backend only: the next discretized ratio.
    double next_lattice();
    /// R_n (exact) or the discretized ratio (lattice), as a double.
    double next_value();

    Backend backend() const noexcept { return sampler_->backend(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_id() const noexcept { return path_id_; }
    /// Index of the next value to be emitted (starts at 1).
    std::size_t position() const noexcept { return n_; }
    /// B_n for the exact backend (after the first draw).
    const BigInt& current_digit() const noexcept { return digit_; }

    void set_digit_cap(std::optional<BigInt> cap) { cap_ = std::move(cap); }

private:
    Rational draw_rational();
    double draw_double();
    void initialize_digit();

    std::shared_ptr<const Sampler> sampler_;
    std::uint64_t seed_;
    std::uint64_t path_id_;
    UniformStream rng_;
    std::optional<std::vector<Rational>> script_;
    std::size_t script_pos_ = 0;
    std::size_t n_ = 1;
    bool started_ = false;
    BigInt digit_;
    Step step_;
    std::optional<BigInt> cap_;
};

/// Builds a fresh Sampler for each call; prefer Sampler + PathStream when spawning many paths.
PathStream spawn(std::uint64_t seed, std::uint64_t path_id, std::shared_ptr<const OppenheimModel> model,
                 Backend backend);

} // namespace oppenheim
