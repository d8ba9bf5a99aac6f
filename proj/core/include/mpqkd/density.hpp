#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpqkd/graph.hpp"

namespace mpqkd {

/// A qubit is identified by the node holding it and a port at that node
/// (the contracted edge it belongs to, or 0 for a terminal's output qubit).
struct QubitLabel {
    NodeId node = 0;
    std::uint32_t port = 0;

    friend auto operator<=>(const QubitLabel&, const QubitLabel&) = default;
};

std::string to_string(const QubitLabel& label);

enum class Pauli : std::uint8_t { I, X, Y, Z };

/// Dense density operator on up to kMaxQubits labelled qubits.
///
/// Qubit i of labels() is bit (n - 1 - i) of the matrix index, so the first
/// label is the leftmost tensor factor. All operations are pure: they take
/// a const reference and return a new operator.
class DensityOperator {
public:
    static constexpr std::size_t kMaxQubits = 12;

    DensityOperator(); // zero qubits, matrix [1]
    DensityOperator(Eigen::MatrixXcd matrix, std::vector<QubitLabel> labels);

    std::size_t qubit_count() const noexcept { return labels_.size(); }
    std::size_t dimension() const noexcept { return std::size_t{1} << labels_.size(); }
    const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    const std::vector<QubitLabel>& labels() const noexcept { return labels_; }

    bool has(const QubitLabel& label) const noexcept;
    std::size_t index_of(const QubitLabel& label) const; // throws InvalidArgument

    double trace() const;

    // Hermitian to hermitian_tol, trace within trace_tol of 1, minimum
    // eigenvalue >= -eigen_tol, labels unique. Throws ContractViolation.
    void check_invariants(double hermitian_tol = 1e-12, double trace_tol = 1e-12, double eigen_tol = 1e-9) const;

    // Same operator with qubits reordered to `order` (a permutation of labels()).
    DensityOperator permuted(std::span<const QubitLabel> order) const;
    DensityOperator relabeled(std::vector<QubitLabel> labels) const;

private:
    Eigen::MatrixXcd rho_;
    std::vector<QubitLabel> labels_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

struct WernerParams {
    double gamma = 1.0;
};

// gamma |Phi+><Phi+| + (1 - gamma) I/4 on (a, b).
DensityOperator werner_pair(WernerParams params, QubitLabel a = {0, 0}, QubitLabel b = {1, 0});

// Single-qubit depolarizing channel: gamma rho + (1 - gamma) tr_q(rho) (x) I/2.
DensityOperator depolarize(const DensityOperator& state, const QubitLabel& qubit, double gamma);

DensityOperator apply_pauli(const DensityOperator& state, const QubitLabel& qubit, Pauli pauli);
DensityOperator apply_cnot(const DensityOperator& state, const QubitLabel& control, const QubitLabel& target);
DensityOperator apply_hadamard(const DensityOperator& state, const QubitLabel& qubit);

/// Complete k-qubit GHZ-basis measurement on `measured` (k >= 2), followed
/// by the Pauli correction that maps each outcome to the canonical branch.
///
/// correction_groups[i] lists the qubits that must be X-flipped when
/// measured[i] disagrees with measured[0] (for i = 0 it is only used to pick
/// the Z target). For a bare Bell pair the group is just the partner; for a
/// qubit already fused into a larger GHZ component it is the rest of that
/// component. A phase-flip outcome is fixed by one Z on the lowest label
/// across all groups. The result is the outcome-averaged corrected state
/// with the measured qubits removed.
DensityOperator ghz_projective_merge(const DensityOperator& state, std::span<const QubitLabel> measured,
                                     std::span<const std::vector<QubitLabel>> correction_groups);

// Overload with a single partner qubit per measured qubit.
DensityOperator ghz_projective_merge(const DensityOperator& state, std::span<const QubitLabel> measured,
                                     std::span<const QubitLabel> partners);

/// CNOT(retained -> absorbed), Z measurement of absorbed, X on every qubit
/// of absorbed_side when the outcome is 1. Outcome-averaged; absorbed is
/// removed.
DensityOperator fusion_merge(const DensityOperator& state, const QubitLabel& retained, const QubitLabel& absorbed,
                             std::span<const QubitLabel> absorbed_side);

/// X-basis measurement of `qubit` with a Z on z_target for the minus
/// outcome. Closes a k-GHZ measurement that was carried out as a chain of
/// fusions into a single retained qubit.
DensityOperator measure_x_and_correct(const DensityOperator& state, const QubitLabel& qubit,
                                      const QubitLabel& z_target);

// Trace of rho * P for the Pauli string P (one entry per qubit, in label order).
double pauli_expectation(const DensityOperator& state, std::span<const Pauli> paulis);

double fidelity_with_ghz(const DensityOperator& state);

// (row, col, re, im) per entry with magnitude > 1e-14, row-major, 15
// significant digits.
void dump(std::ostream& out, const DensityOperator& state);

} // namespace mpqkd
