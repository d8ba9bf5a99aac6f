#include "mpqkd/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "mpqkd/errors.hpp"

namespace mpqkd {

using cd = std::complex<double>;
using Index = Eigen::Index;

std::string to_string(const QubitLabel& label)
{
    return std::to_string(label.node) + ":" + std::to_string(label.port);
}

namespace {

void check_capacity(std::size_t n)
{
    if (n > DensityOperator::kMaxQubits)
        throw CapacityError("density operator would hold " + std::to_string(n) + " qubits (max " +
                            std::to_string(DensityOperator::kMaxQubits) + ")");
}

// Bit of qubit `i` in an n-qubit index.
std::size_t bit_of(std::size_t i, std::size_t n) { return std::size_t{1} << (n - 1 - i); }

void hermitize(Eigen::MatrixXcd& m)
{
    Eigen::MatrixXcd adj = m.adjoint();
    m = 0.5 * (m + adj);
}

// Conjugation by X on every qubit in `mask`.
void flip_in_place(Eigen::MatrixXcd& m, std::size_t mask)
{
    if (mask == 0)
        return;
    Eigen::MatrixXcd out(m.rows(), m.cols());
    const auto dim = static_cast<std::size_t>(m.rows());
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r)
            out(static_cast<Index>(r), static_cast<Index>(c)) =
                m(static_cast<Index>(r ^ mask), static_cast<Index>(c ^ mask));
    m = std::move(out);
}

// Conjugation by Z on the qubit with bit `bit`.
void phase_in_place(Eigen::MatrixXcd& m, std::size_t bit)
{
    const auto dim = static_cast<std::size_t>(m.rows());
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r)
            if (((r & bit) != 0) != ((c & bit) != 0))
                m(static_cast<Index>(r), static_cast<Index>(c)) *= -1.0;
}

struct Removal {
    std::vector<QubitLabel> kept_labels;
    std::vector<std::size_t> base; // new index -> old index with removed bits cleared
};

Removal plan_removal(const std::vector<QubitLabel>& labels, const std::vector<std::size_t>& removed_idx)
{
    const std::size_t n = labels.size();
    Removal out;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(removed_idx.begin(), removed_idx.end(), i) == removed_idx.end()) {
            kept.push_back(i);
            out.kept_labels.push_back(labels[i]);
        }
    const std::size_t m = kept.size();
    out.base.resize(std::size_t{1} << m);
    for (std::size_t j = 0; j < out.base.size(); ++j) {
        std::size_t old = 0;
        for (std::size_t k = 0; k < m; ++k)
            if (j & bit_of(k, m))
                old |= bit_of(kept[k], n);
        out.base[j] = old;
    }
    return out;
}

Eigen::MatrixXcd extract_block(const Eigen::MatrixXcd& m, const Removal& plan, std::size_t pattern)
{
    const auto dim = plan.base.size();
    Eigen::MatrixXcd out(static_cast<Index>(dim), static_cast<Index>(dim));
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r)
            out(static_cast<Index>(r), static_cast<Index>(c)) =
                m(static_cast<Index>(plan.base[r] | pattern), static_cast<Index>(plan.base[c] | pattern));
    return out;
}

std::size_t mask_in(const std::vector<QubitLabel>& labels, std::span<const QubitLabel> qubits)
{
    std::size_t mask = 0;
    for (const auto& q : qubits) {
        auto it = std::find(labels.begin(), labels.end(), q);
        if (it == labels.end())
            throw InvalidArgument("correction target " + to_string(q) + " not present");
        mask |= bit_of(static_cast<std::size_t>(it - labels.begin()), labels.size());
    }
    return mask;
}

} // namespace

DensityOperator::DensityOperator()
    : rho_(Eigen::MatrixXcd::Ones(1, 1))
{
}

DensityOperator::DensityOperator(Eigen::MatrixXcd matrix, std::vector<QubitLabel> labels)
    : rho_(std::move(matrix)), labels_(std::move(labels))
{
    check_capacity(labels_.size());
    const auto dim = static_cast<Index>(std::size_t{1} << labels_.size());
    if (rho_.rows() != dim || rho_.cols() != dim)
        throw InvalidArgument("matrix dimension does not match qubit count");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("qubit labels must be unique");
}

bool DensityOperator::has(const QubitLabel& label) const noexcept
{
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t DensityOperator::index_of(const QubitLabel& label) const
{
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw InvalidArgument("unknown qubit " + to_string(label));
    return static_cast<std::size_t>(it - labels_.begin());
}

double DensityOperator::trace() const { return rho_.trace().real(); }

void DensityOperator::check_invariants(double hermitian_tol, double trace_tol, double eigen_tol) const
{
    double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > hermitian_tol)
        throw ContractViolation("density operator not Hermitian (deviation " + std::to_string(herm) + ")");
    auto tr = rho_.trace();
    if (std::abs(tr - cd(1.0, 0.0)) > trace_tol)
        throw ContractViolation("density operator trace " + std::to_string(tr.real()) + " != 1");
    Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -eigen_tol)
        throw ContractViolation("density operator has negative eigenvalue " + std::to_string(min_ev));
}

DensityOperator DensityOperator::permuted(std::span<const QubitLabel> order) const
{
    const std::size_t n = labels_.size();
    if (order.size() != n)
        throw InvalidArgument("permutation must list every qubit");
    std::vector<std::size_t> src(n);
    for (std::size_t i = 0; i < n; ++i)
        src[i] = index_of(order[i]);
    {
        auto s = src;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InvalidArgument("permutation repeats a qubit");
    }
    const std::size_t dim = dimension();
    std::vector<std::size_t> map(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::size_t old = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (j & bit_of(i, n))
                old |= bit_of(src[i], n);
        map[j] = old;
    }
    Eigen::MatrixXcd out(rho_.rows(), rho_.cols());
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r)
            out(static_cast<Index>(r), static_cast<Index>(c)) =
                rho_(static_cast<Index>(map[r]), static_cast<Index>(map[c]));
    return DensityOperator(std::move(out), std::vector<QubitLabel>(order.begin(), order.end()));
}

DensityOperator DensityOperator::relabeled(std::vector<QubitLabel> labels) const
{
    if (labels.size() != labels_.size())
        throw InvalidArgument("relabel must keep the qubit count");
    return DensityOperator(rho_, std::move(labels));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b)
{
    check_capacity(a.qubit_count() + b.qubit_count());
    auto labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    const auto& A = a.matrix();
    const auto& B = b.matrix();
    Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return DensityOperator(std::move(out), std::move(labels));
}

DensityOperator werner_pair(WernerParams params, QubitLabel a, QubitLabel b)
{
    const double g = params.gamma;
    if (!(g >= 0.0 && g <= 1.0))
        throw InvalidArgument("Werner gamma outside [0, 1]");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4) * ((1.0 - g) / 4.0);
    // |Phi+><Phi+| has 1/2 at (00,00), (00,11), (11,00), (11,11).
    m(0, 0) += g / 2.0;
    m(0, 3) += g / 2.0;
    m(3, 0) += g / 2.0;
    m(3, 3) += g / 2.0;
    return DensityOperator(std::move(m), {a, b});
}

DensityOperator depolarize(const DensityOperator& state, const QubitLabel& qubit, double gamma)
{
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw InvalidArgument("depolarizing gamma outside [0, 1]");
    const std::size_t bit = bit_of(state.index_of(qubit), state.qubit_count());
    const auto& m = state.matrix();
    const std::size_t dim = state.dimension();
    Eigen::MatrixXcd out(m.rows(), m.cols());
    const double mix = (1.0 - gamma) / 2.0;
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            cd v = gamma * m(static_cast<Index>(r), static_cast<Index>(c));
            if (((r & bit) != 0) == ((c & bit) != 0)) {
                const std::size_t r0 = r & ~bit, c0 = c & ~bit;
                v += mix * (m(static_cast<Index>(r0), static_cast<Index>(c0)) +
                            m(static_cast<Index>(r0 | bit), static_cast<Index>(c0 | bit)));
            }
            out(static_cast<Index>(r), static_cast<Index>(c)) = v;
        }
    }
    return DensityOperator(std::move(out), state.labels());
}

DensityOperator apply_pauli(const DensityOperator& state, const QubitLabel& qubit, Pauli pauli)
{
    const std::size_t bit = bit_of(state.index_of(qubit), state.qubit_count());
    Eigen::MatrixXcd m = state.matrix();
    switch (pauli) {
    case Pauli::I: break;
    case Pauli::X: flip_in_place(m, bit); break;
    case Pauli::Z: phase_in_place(m, bit); break;
    case Pauli::Y: // Y rho Y = (XZ) rho (XZ)^dagger up to a global phase
        phase_in_place(m, bit);
        flip_in_place(m, bit);
        break;
    }
    return DensityOperator(std::move(m), state.labels());
}

DensityOperator apply_cnot(const DensityOperator& state, const QubitLabel& control, const QubitLabel& target)
{
    if (control == target)
        throw InvalidArgument("CNOT control and target must differ");
    const std::size_t n = state.qubit_count();
    const std::size_t cb = bit_of(state.index_of(control), n);
    const std::size_t tb = bit_of(state.index_of(target), n);
    const auto& m = state.matrix();
    const std::size_t dim = state.dimension();
    auto f = [&](std::size_t x) { return (x & cb) ? (x ^ tb) : x; };
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r)
            out(static_cast<Index>(r), static_cast<Index>(c)) = m(static_cast<Index>(f(r)), static_cast<Index>(f(c)));
    return DensityOperator(std::move(out), state.labels());
}

DensityOperator apply_hadamard(const DensityOperator& state, const QubitLabel& qubit)
{
    const std::size_t bit = bit_of(state.index_of(qubit), state.qubit_count());
    const std::size_t dim = state.dimension();
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m = state.matrix();
    // rows
    for (std::size_t r = 0; r < dim; ++r) {
        if (r & bit)
            continue;
        auto r0 = static_cast<Index>(r), r1 = static_cast<Index>(r | bit);
        Eigen::RowVectorXcd a = m.row(r0), b = m.row(r1);
        m.row(r0) = s * (a + b);
        m.row(r1) = s * (a - b);
    }
    // columns
    for (std::size_t c = 0; c < dim; ++c) {
        if (c & bit)
            continue;
        auto c0 = static_cast<Index>(c), c1 = static_cast<Index>(c | bit);
        Eigen::VectorXcd a = m.col(c0), b = m.col(c1);
        m.col(c0) = s * (a + b);
        m.col(c1) = s * (a - b);
    }
    return DensityOperator(std::move(m), state.labels());
}

DensityOperator ghz_projective_merge(const DensityOperator& state, std::span<const QubitLabel> measured,
                                     std::span<const std::vector<QubitLabel>> correction_groups)
{
    const std::size_t k = measured.size();
    if (k < 2)
        throw InvalidArgument("GHZ merge needs at least two measured qubits");
    if (correction_groups.size() != k)
        throw InvalidArgument("one correction group per measured qubit is required");
    std::vector<std::size_t> idx;
    for (const auto& q : measured)
        idx.push_back(state.index_of(q));
    {
        auto s = idx;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InvalidArgument("measured qubits must be distinct");
    }
    QubitLabel z_target{};
    bool have_z = false;
    for (const auto& group : correction_groups)
        for (const auto& q : group) {
            if (std::find(measured.begin(), measured.end(), q) != measured.end())
                throw InvalidArgument("correction target " + to_string(q) + " is being measured");
            state.index_of(q);
            if (!have_z || q < z_target) {
                z_target = q;
                have_z = true;
            }
        }

    // Rotate the GHZ basis onto the computational basis: |GHZ_{s,b}> -> |b>|s>.
    DensityOperator work = state;
    for (std::size_t i = 1; i < k; ++i)
        work = apply_cnot(work, measured[0], measured[i]);
    work = apply_hadamard(work, measured[0]);

    const std::size_t n = work.qubit_count();
    Removal plan = plan_removal(work.labels(), idx);
    std::vector<std::size_t> group_masks;
    for (const auto& group : correction_groups)
        group_masks.push_back(mask_in(plan.kept_labels, group));
    const std::size_t z_bit = have_z ? mask_in(plan.kept_labels, std::span<const QubitLabel>(&z_target, 1)) : 0;

    const auto out_dim = static_cast<Index>(plan.base.size());
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    for (std::size_t outcome = 0; outcome < (std::size_t{1} << k); ++outcome) {
        std::size_t pattern = 0, flips = 0;
        for (std::size_t i = 0; i < k; ++i) {
            bool one = (outcome >> i) & 1U;
            if (!one)
                continue;
            pattern |= bit_of(idx[i], n);
            if (i > 0)
                flips ^= group_masks[i];
        }
        Eigen::MatrixXcd block = extract_block(work.matrix(), plan, pattern);
        flip_in_place(block, flips);
        if ((outcome & 1U) && z_bit)
            phase_in_place(block, z_bit);
        acc += block;
    }
    hermitize(acc);
    return DensityOperator(std::move(acc), std::move(plan.kept_labels));
}

DensityOperator ghz_projective_merge(const DensityOperator& state, std::span<const QubitLabel> measured,
                                     std::span<const QubitLabel> partners)
{
    if (partners.size() != measured.size())
        throw InvalidArgument("one partner per measured qubit is required");
    std::vector<std::vector<QubitLabel>> groups;
    for (const auto& p : partners)
        groups.push_back({p});
    return ghz_projective_merge(state, measured, groups);
}

DensityOperator fusion_merge(const DensityOperator& state, const QubitLabel& retained, const QubitLabel& absorbed,
                             std::span<const QubitLabel> absorbed_side)
{
    if (retained == absorbed)
        throw InvalidArgument("fusion needs distinct retained and absorbed qubits");
    for (const auto& q : absorbed_side)
        if (q == retained || q == absorbed)
            throw InvalidArgument("absorbed side must not contain the fused qubits");
    DensityOperator work = apply_cnot(state, retained, absorbed);
    const std::size_t n = work.qubit_count();
    const std::size_t a_idx = work.index_of(absorbed);
    Removal plan = plan_removal(work.labels(), {a_idx});
    const std::size_t flips = mask_in(plan.kept_labels, absorbed_side);

    Eigen::MatrixXcd acc = extract_block(work.matrix(), plan, 0);
    Eigen::MatrixXcd one = extract_block(work.matrix(), plan, bit_of(a_idx, n));
    flip_in_place(one, flips);
    acc += one;
    hermitize(acc);
    return DensityOperator(std::move(acc), std::move(plan.kept_labels));
}

DensityOperator measure_x_and_correct(const DensityOperator& state, const QubitLabel& qubit,
                                      const QubitLabel& z_target)
{
    if (qubit == z_target)
        throw InvalidArgument("Z correction target must differ from the measured qubit");
    DensityOperator work = apply_hadamard(state, qubit);
    const std::size_t n = work.qubit_count();
    const std::size_t q_idx = work.index_of(qubit);
    Removal plan = plan_removal(work.labels(), {q_idx});
    const std::size_t z_bit = mask_in(plan.kept_labels, std::span<const QubitLabel>(&z_target, 1));

    Eigen::MatrixXcd acc = extract_block(work.matrix(), plan, 0);
    Eigen::MatrixXcd minus = extract_block(work.matrix(), plan, bit_of(q_idx, n));
    phase_in_place(minus, z_bit);
    acc += minus;
    hermitize(acc);
    return DensityOperator(std::move(acc), std::move(plan.kept_labels));
}

double pauli_expectation(const DensityOperator& state, std::span<const Pauli> paulis)
{
    const std::size_t n = state.qubit_count();
    if (paulis.size() != n)
        throw InvalidArgument("Pauli string length must equal qubit count");
    std::size_t xmask = 0, zmask = 0, ycount = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = bit_of(i, n);
        switch (paulis[i]) {
        case Pauli::I: break;
        case Pauli::X: xmask |= b; break;
        case Pauli::Z: zmask |= b; break;
        case Pauli::Y:
            xmask |= b;
            zmask |= b;
            ++ycount;
            break;
        }
    }
    // P|c> = i^{#Y} (-1)^{popcount(c & zmask)} |c ^ xmask>
    static const cd ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cd global = ipow[ycount % 4];
    const auto& m = state.matrix();
    cd sum = 0.0;
    for (std::size_t c = 0; c < state.dimension(); ++c) {
        double sign = (__builtin_popcountll(c & zmask) & 1) ? -1.0 : 1.0;
        sum += sign * m(static_cast<Index>(c), static_cast<Index>(c ^ xmask));
    }
    return (global * sum).real();
}

double fidelity_with_ghz(const DensityOperator& state)
{
    const std::size_t n = state.qubit_count();
    if (n == 0)
        throw InvalidArgument("fidelity needs at least one qubit");
    const auto last = static_cast<Index>(state.dimension() - 1);
    const auto& m = state.matrix();
    return 0.5 * (m(0, 0) + m(last, last) + m(0, last) + m(last, 0)).real();
}

void dump(std::ostream& out, const DensityOperator& state)
{
    const auto& m = state.matrix();
    char buf[128];
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) {
            const cd v = m(r, c);
            if (std::abs(v) > 1e-14) {
                std::snprintf(buf, sizeof buf, "%ld %ld %.15g %.15g\n", static_cast<long>(r), static_cast<long>(c),
                              v.real(), v.imag());
                out << buf;
            }
        }
}

} // namespace mpqkd
