#pragma once

#include <stdexcept>
#include <string>

namespace mbspec {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A physically or numerically invalid input (V < 0, L <= 0, c <= 0,
/// energies outside the regime domain, malformed grids/windows).
class invalid_config : public error {
public:
  using error::error;
};

/// Evaluation exactly at a removable/true singularity of the closed forms
/// (e.g. E == V, where q = 0 and xi = q/k + k/q diverges).
class singularity_error : public error {
public:
  using error::error;
};

/// Request for the below-barrier dispersion at an energy in the excluded
/// band 0 < E <= V/(1+c), where the squared-cosine coefficient is
/// non-positive and no propagating solution exists.
class excluded_energy : public error {
public:
  using error::error;
};

/// Division-by-zero in a closed form (cot poles and friends) where the
/// caller asked for a hard error instead of a flagged value.
class pole_error : public error {
public:
  using error::error;
};

/// Bloch-phase extraction requested where the phase argument is imaginary
/// (evanescent envelope), so no real quasi-momentum exists.
class branch_error : public error {
public:
  using error::error;
};

/// The solver declined to run: empty window, window touching the E == V
/// exclusion band, or a grid that would exceed the configured point budget.
class solver_refusal : public error {
public:
  using error::error;
};

}  // namespace mbspec
