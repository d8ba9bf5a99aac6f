#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mpqkd/density.hpp"
#include "mpqkd/errors.hpp"

using namespace mpqkd;

namespace {

const QubitLabel A{0, 0}, B{1, 0}, C{2, 0}, D{3, 0};

double max_diff(const DensityOperator& x, const DensityOperator& y)
{
    EXPECT_EQ(x.labels(), y.labels());
    return (x.matrix() - y.matrix()).cwiseAbs().maxCoeff();
}

DensityOperator ghz(std::size_t n)
{
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    m(0, 0) = m(d - 1, d - 1) = m(0, d - 1) = m(d - 1, 0) = 0.5;
    std::vector<QubitLabel> labels;
    for (std::size_t i = 0; i < n; ++i)
        labels.push_back({static_cast<NodeId>(i), 0});
    return DensityOperator(m, labels);
}

} // namespace

TEST(Werner, IdealAndMixedLimits)
{
    auto ideal = werner_pair({1.0});
    EXPECT_NEAR(max_diff(ideal, ghz(2)), 0.0, 1e-15);
    auto mixed = werner_pair({0.0});
    Eigen::MatrixXcd quarter = Eigen::MatrixXcd::Identity(4, 4) / 4.0;
    EXPECT_NEAR((mixed.matrix() - quarter).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_NEAR(fidelity_with_ghz(werner_pair({0.6})), 0.7, 1e-12);
    EXPECT_THROW(werner_pair({1.2}), InvalidArgument);
}

TEST(Werner, PauliCorrelations)
{
    auto w = werner_pair({0.8});
    const Pauli zz[] = {Pauli::Z, Pauli::Z}, xx[] = {Pauli::X, Pauli::X}, yy[] = {Pauli::Y, Pauli::Y},
                zi[] = {Pauli::Z, Pauli::I};
    EXPECT_NEAR(pauli_expectation(w, zz), 0.8, 1e-12);
    EXPECT_NEAR(pauli_expectation(w, xx), 0.8, 1e-12);
    EXPECT_NEAR(pauli_expectation(w, yy), -0.8, 1e-12);
    EXPECT_NEAR(pauli_expectation(w, zi), 0.0, 1e-12);
}

TEST(DensityOperator, InvariantsAndLabels)
{
    DensityOperator empty;
    EXPECT_EQ(empty.qubit_count(), 0u);
    EXPECT_NEAR(empty.trace(), 1.0, 1e-15);
    auto w = werner_pair({0.3}, A, B);
    EXPECT_NO_THROW(w.check_invariants());
    EXPECT_TRUE(w.has(B));
    EXPECT_EQ(w.index_of(B), 1u);
    EXPECT_THROW(w.index_of(C), InvalidArgument);

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    EXPECT_THROW(DensityOperator(bad, {A}).check_invariants(), ContractViolation);
    Eigen::MatrixXcd nonherm = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
    nonherm(0, 1) = 0.1;
    EXPECT_THROW(DensityOperator(nonherm, {A}).check_invariants(), ContractViolation);
    EXPECT_THROW(DensityOperator(Eigen::MatrixXcd::Identity(2, 2) / 2.0, {A, B}), InvalidArgument);
    EXPECT_THROW(DensityOperator(Eigen::MatrixXcd::Identity(4, 4) / 4.0, {A, A}), InvalidArgument);
}

TEST(DensityOperator, TensorPermuteRelabel)
{
    auto t = tensor(werner_pair({0.9}, A, B), werner_pair({0.7}, C, D));
    EXPECT_EQ(t.qubit_count(), 4u);
    EXPECT_EQ(t.labels(), (std::vector<QubitLabel>{A, B, C, D}));
    const QubitLabel order[] = {C, D, A, B};
    auto p = t.permuted(order);
    auto direct = tensor(werner_pair({0.7}, C, D), werner_pair({0.9}, A, B));
    EXPECT_NEAR(max_diff(p, direct), 0.0, 1e-15);
    auto r = p.relabeled({A, B, C, D});
    EXPECT_EQ(r.labels().front(), A);
    EXPECT_THROW(tensor(t, werner_pair({1}, A, QubitLabel{9, 9})), InvalidArgument);
    const QubitLabel partial[] = {A, B};
    EXPECT_THROW(t.permuted(partial), InvalidArgument);
}

TEST(DensityOperator, CapacityIsEnforced)
{
    DensityOperator s;
    for (NodeId i = 0; i < 6; ++i)
        s = tensor(s, werner_pair({1.0}, {i, 0}, {i, 1}));
    EXPECT_EQ(s.qubit_count(), 12u);
    EXPECT_THROW(tensor(s, DensityOperator(Eigen::MatrixXcd::Identity(2, 2) / 2.0, {{99, 0}})), CapacityError);
}

TEST(Depolarize, LimitsAndSideSymmetry)
{
    auto ideal = werner_pair({1.0});
    EXPECT_NEAR(max_diff(depolarize(ideal, A, 1.0), ideal), 0.0, 1e-15);
    EXPECT_NEAR(max_diff(depolarize(ideal, A, 0.0), werner_pair({0.0})), 0.0, 1e-15);
    auto left = depolarize(ideal, A, 0.9);
    auto right = depolarize(ideal, B, 0.9);
    EXPECT_NEAR(max_diff(left, right), 0.0, 1e-12);
    EXPECT_NEAR(max_diff(left, werner_pair({0.9})), 0.0, 1e-12);
    EXPECT_THROW(depolarize(ideal, C, 0.5), InvalidArgument);
}

TEST(Gates, PauliAndHadamardAndCnot)
{
    auto w = werner_pair({1.0});
    auto xx = apply_pauli(apply_pauli(w, A, Pauli::X), B, Pauli::X);
    EXPECT_NEAR(max_diff(xx, w), 0.0, 1e-15);
    auto flipped = apply_pauli(w, A, Pauli::Z);
    const Pauli xxs[] = {Pauli::X, Pauli::X};
    EXPECT_NEAR(pauli_expectation(flipped, xxs), -1.0, 1e-12);
    // CNOT then H on the control turns Phi+ into |00>
    auto basis = apply_hadamard(apply_cnot(w, A, B), A);
    EXPECT_NEAR(basis.matrix()(0, 0).real(), 1.0, 1e-12);
    EXPECT_THROW(apply_cnot(w, A, A), InvalidArgument);
}

TEST(GhzMerge, IdealSwap)
{
    auto s = tensor(werner_pair({1.0}, A, {1, 1}), werner_pair({1.0}, {1, 2}, C));
    const QubitLabel measured[] = {{1, 1}, {1, 2}};
    const QubitLabel partners[] = {A, C};
    auto out = ghz_projective_merge(s, measured, partners);
    EXPECT_EQ(out.labels(), (std::vector<QubitLabel>{A, C}));
    EXPECT_NEAR(fidelity_with_ghz(out), 1.0, 1e-12);
}

TEST(GhzMerge, NoisySwapMultipliesGamma)
{
    auto s = tensor(werner_pair({0.9}, A, {1, 1}), werner_pair({0.8}, {1, 2}, C));
    const QubitLabel measured[] = {{1, 1}, {1, 2}};
    const QubitLabel partners[] = {A, C};
    auto out = ghz_projective_merge(s, measured, partners);
    EXPECT_NEAR(max_diff(out, werner_pair({0.72}, A, C)), 0.0, 1e-12);
    EXPECT_NEAR(out.trace(), 1.0, 1e-12);
}

TEST(GhzMerge, ThreeIdealPairsGiveGhz)
{
    DensityOperator s;
    std::vector<QubitLabel> measured, partners;
    for (NodeId i = 0; i < 3; ++i) {
        s = tensor(s, werner_pair({1.0}, {i, 0}, {9, i + 1}));
        measured.push_back({9, i + 1});
        partners.push_back({i, 0});
    }
    auto out = ghz_projective_merge(s, measured, partners);
    EXPECT_NEAR(fidelity_with_ghz(out), 1.0, 1e-12);
    EXPECT_NO_THROW(out.check_invariants());
}

TEST(GhzMerge, RejectsBadArguments)
{
    auto s = tensor(werner_pair({1.0}, A, B), werner_pair({1.0}, C, D));
    const QubitLabel one[] = {B};
    const QubitLabel one_p[] = {A};
    EXPECT_THROW(ghz_projective_merge(s, one, one_p), InvalidArgument);
    const QubitLabel same[] = {B, B};
    const QubitLabel pp[] = {A, D};
    EXPECT_THROW(ghz_projective_merge(s, same, pp), InvalidArgument);
    const QubitLabel m[] = {B, C};
    const QubitLabel clash[] = {A, C};
    EXPECT_THROW(ghz_projective_merge(s, m, clash), InvalidArgument);
}

TEST(Fusion, BellPlusBellIsThreeGhz)
{
    // terminal holds qubits {5,1} and {5,2}
    auto s = tensor(werner_pair({1.0}, A, {5, 1}), werner_pair({1.0}, {5, 2}, C));
    const QubitLabel side[] = {C};
    auto out = fusion_merge(s, {5, 1}, {5, 2}, side);
    EXPECT_EQ(out.qubit_count(), 3u);
    EXPECT_NEAR(fidelity_with_ghz(out), 1.0, 1e-12);
}

TEST(Fusion, ThreeGhzPlusBellIsFourGhz)
{
    auto g3 = ghz(3); // qubits 0,1,2
    auto s = tensor(g3, werner_pair({1.0}, {7, 0}, {8, 0}));
    const QubitLabel side[] = {{8, 0}};
    auto out = fusion_merge(s, {2, 0}, {7, 0}, side);
    EXPECT_EQ(out.qubit_count(), 4u);
    EXPECT_NEAR(fidelity_with_ghz(out), 1.0, 1e-12);
}

TEST(Fusion, RejectsOverlappingSide)
{
    auto s = tensor(werner_pair({1.0}, A, B), werner_pair({1.0}, C, D));
    const QubitLabel side[] = {C};
    EXPECT_THROW(fusion_merge(s, B, C, side), InvalidArgument);
    const QubitLabel d[] = {D};
    EXPECT_THROW(fusion_merge(s, B, B, d), InvalidArgument);
}

TEST(MeasureX, ClosesIncrementalGhzMeasurement)
{
    // fuse two pairs into one qubit at a repeater, then measure it out
    auto s = tensor(werner_pair({1.0}, A, {5, 1}), werner_pair({1.0}, {5, 2}, C));
    const QubitLabel side[] = {C};
    auto fused = fusion_merge(s, {5, 1}, {5, 2}, side);
    auto out = measure_x_and_correct(fused, {5, 1}, A);
    EXPECT_EQ(out.labels(), (std::vector<QubitLabel>{A, C}));
    EXPECT_NEAR(fidelity_with_ghz(out), 1.0, 1e-12);
    EXPECT_THROW(measure_x_and_correct(fused, A, A), InvalidArgument);
}

TEST(PauliExpectation, MaximallyMixedAndGhz)
{
    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(8, 8) / 8.0;
    DensityOperator m(mixed, {A, B, C});
    const Pauli xxx[] = {Pauli::X, Pauli::X, Pauli::X};
    EXPECT_NEAR(pauli_expectation(m, xxx), 0.0, 1e-15);
    const Pauli yyx[] = {Pauli::Y, Pauli::Y, Pauli::X};
    EXPECT_NEAR(pauli_expectation(ghz(3), xxx), 1.0, 1e-15);
    EXPECT_NEAR(pauli_expectation(ghz(3), yyx), -1.0, 1e-15);
    const Pauli two[] = {Pauli::X, Pauli::X};
    EXPECT_THROW(pauli_expectation(m, two), InvalidArgument);
}

TEST(Dump, FormatIsRowColReIm)
{
    std::ostringstream out;
    dump(out, werner_pair({1.0}));
    EXPECT_EQ(out.str(), "0 0 0.5 0\n0 3 0.5 0\n3 0 0.5 0\n3 3 0.5 0\n");
}
