#pragma once

#include "oppenheim/model.hpp"

#include <filesystem>
#include <string>

namespace oppenheim {

/// Model configuration: a flat key-value document with sections [phi], [dist],
/// [q], [lattice], [initial]. Keys may be written inside a section
/// (`kind = "power_sum"` under [phi]) or fully qualified (`phi.kind = ...`).
/// Rationals are "p/q" strings.
///
///   phi.kind              constant | power_sum | reciprocal_periodic
///   phi.value             "p/q"               (constant)
///   phi.m                 integer             (power_sum)
///   phi.include_zero_term true | false        (power_sum)
///   phi.periods           [a1, a2, ...]       (reciprocal_periodic)
///   dist.kind             linear | polynomial | piecewise_linear
///   dist.coefficients     ["c0", "c1", ...]   (polynomial)
///   dist.knots            [["t", "F"], ...]   (piecewise_linear)
///   q.kind                zero | constant | lattice_periodic
///   q.value               "p/q" | [x1, x2, ...]
///   lattice.kind          arithmetic | explicit | none
///   lattice.kappa         integer             (arithmetic)
///   lattice.values        [l1, l2, ...]       (explicit)
///   lattice.tail_step     integer             (explicit)
///   initial.rule          virtual_zeroth | fixed
///   initial.value         integer             (fixed)
///
/// Throws ConfigError with the offending line on malformed input.
OppenheimModel parse_model_config(const std::string& text);
OppenheimModel load_model_file(const std::filesystem::path& path);

/// Canonical text form; parse_model_config(serialize_model_config(m)) reproduces m.
std::string serialize_model_config(const OppenheimModel& model);

} // namespace oppenheim
