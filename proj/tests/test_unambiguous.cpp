#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vndisc/unambiguous.hpp"

using namespace vndisc;

namespace {

// Measurement channel block oracle: (P (x) id)(|psi><psi|) restricted to
// label i is the ancilla block <i| (V^dag (x) id) sigma (V (x) id) |i>.
CMat label_block(const CMat& sigma, const CMat& v, int d, int label) {
    const CMat rotated = kron(v.adjoint(), CMat::Identity(d, d)) * sigma *
                         kron(v, CMat::Identity(d, d));
    return rotated.block(label * d, label * d, d, d);
}

CVec purification_vector(const CMat& rho) {
    const int d = static_cast<int>(rho.rows());
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const CMat x = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    CVec psi(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) psi[i * d + j] = x(i, j);
    return psi;
}

}  // namespace

TEST_CASE("closed form fixed values") {
    REQUIRE(unambiguous_entassisted_closed(named_family(Family::identity, 3)) ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE(unambiguous_entassisted_closed(named_family(Family::hadamard, 2)) ==
            Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)).margin(1e-9));
    REQUIRE(unambiguous_entassisted_closed(named_family(Family::permutation, 2, {2, 1})) ==
            Catch::Approx(1.0).margin(1e-9));
    // Three-cycle: upsilon = 4*pi/3 >= pi, so the distance saturates.
    REQUIRE(unambiguous_entassisted_closed(named_family(Family::permutation, 3, {2, 3, 1})) ==
            Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("entanglement-assisted fixed values") {
    const auto id = unambiguous_entassisted(named_family(Family::identity, 2));
    REQUIRE(id.probability == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(id.assisted);

    const auto had = unambiguous_entassisted(named_family(Family::hadamard, 2));
    REQUIRE(had.probability == Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)).margin(1e-6));
    REQUIRE(had.converged);

    const auto swap = unambiguous_entassisted(named_family(Family::permutation, 2, {2, 1}));
    REQUIRE(swap.probability == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("entanglement-assisted matches the closed form on random unitaries") {
    for (int d : {2, 3, 4}) {
        for (int s = 0; s < 4; ++s) {
            const Unitary u = haar_unitary(d, 4100 + 10 * d + s);
            const auto res = unambiguous_entassisted(u);
            const double closed = unambiguous_entassisted_closed(u);
            INFO("d=" << d << " s=" << s << " p=" << res.probability << " closed=" << closed);
            REQUIRE(res.probability >= 0.0);
            REQUIRE(res.probability <= 1.0);
            REQUIRE(std::fabs(res.probability - closed) <= 1e-4);
        }
    }
}

TEST_CASE("assisted effects are a valid POVM with zero unambiguity residuals") {
    for (int s = 0; s < 3; ++s) {
        const Unitary u = haar_unitary(3, 4200 + s);
        const int d = u.dim();
        const auto res = unambiguous_entassisted(u);
        REQUIRE(res.effects.size() == static_cast<size_t>(d));

        // POVM validity per label.
        for (const auto& eff : res.effects) {
            Eigen::SelfAdjointEigenSolver<CMat> e1(eff.t_identity), e2(eff.t_unitary),
                e3(eff.t_inconclusive);
            REQUIRE(e1.eigenvalues().minCoeff() >= -1e-10);
            REQUIRE(e2.eigenvalues().minCoeff() >= -1e-10);
            REQUIRE(e3.eigenvalues().minCoeff() >= -1e-10);
            REQUIRE(max_abs(CMat(eff.t_identity + eff.t_unitary + eff.t_inconclusive -
                                 CMat::Identity(d, d))) <= 1e-12);
        }

        // Unambiguity: the U-conclusive effect never fires on the identity
        // branch and vice versa, evaluated on the purified input.
        const CVec psi = purification_vector(res.optimal_input.mat());
        const CMat sigma = psi * psi.adjoint();
        double res_u_on_id = 0.0, res_id_on_u = 0.0;
        for (int i = 0; i < d; ++i) {
            const CMat bid = label_block(sigma, CMat::Identity(d, d), d, i);
            const CMat bu = label_block(sigma, u.mat(), d, i);
            res_u_on_id += (res.effects[static_cast<size_t>(i)].t_unitary * bid).trace().real();
            res_id_on_u += (res.effects[static_cast<size_t>(i)].t_identity * bu).trace().real();
        }
        REQUIRE(std::fabs(res_u_on_id) <= 1e-9);
        REQUIRE(std::fabs(res_id_on_u) <= 1e-9);

        // The blocks also recover the label weights and overlaps.
        for (int i = 0; i < d; ++i) {
            const CMat bid = label_block(sigma, CMat::Identity(d, d), d, i);
            REQUIRE(bid.trace().real() ==
                    Catch::Approx(res.p_label[static_cast<size_t>(i)]).margin(1e-10));
        }
    }
}

TEST_CASE("per-label success bound holds at the optimum") {
    for (int s = 0; s < 3; ++s) {
        const Unitary u = haar_unitary(3, 4300 + s);
        const auto res = unambiguous_entassisted(u);
        for (size_t i = 0; i < res.overlap_c.size(); ++i) {
            const double p = res.p_label[i], q = res.q_label[i];
            if (p <= 1e-12 || q <= 1e-12) continue;
            const double bound = 1.0 - 2.0 * res.overlap_c[i] * std::sqrt(p * q) / (p + q);
            REQUIRE(jaeger_shimony(res.overlap_c[i], res.prior_eta[i]) <= bound + 1e-8);
        }
    }
}

TEST_CASE("entanglement never hurts") {
    for (int d : {2, 3}) {
        for (int s = 0; s < 5; ++s) {
            const Unitary u = haar_unitary(d, 4400 + 10 * d + s);
            REQUIRE(unambiguous_no_ent(u).probability <=
                    unambiguous_entassisted(u).probability + 1e-6);
        }
    }
}

TEST_CASE("subset optimum fixed values") {
    const auto id = unambiguous_no_ent(named_family(Family::identity, 3));
    REQUIRE(id.probability == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(id.strategy.has_value());
    REQUIRE(id.strategy->gamma.empty());
    REQUIRE(id.strategy->delta.empty());

    // Hadamard: value 1/4; the lexicographic winner certifies U on outcome 1
    // from the input |2><2|.
    const auto had = unambiguous_no_ent(named_family(Family::hadamard, 2));
    REQUIRE(had.probability == Catch::Approx(0.25).margin(1e-9));
    REQUIRE(had.strategy->gamma.empty());
    REQUIRE(had.strategy->delta == std::vector<int>{0});
    REQUIRE(had.optimal_input.mat()(1, 1).real() == Catch::Approx(1.0).margin(1e-9));

    // Swap: perfect certification both ways.
    const auto swap = unambiguous_no_ent(named_family(Family::permutation, 2, {2, 1}));
    REQUIRE(swap.probability == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(swap.strategy->gamma == std::vector<int>{0});
    REQUIRE(swap.strategy->delta == std::vector<int>{1});
    REQUIRE(swap.optimal_input.mat()(0, 0).real() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("qubit closed forms agree with the enumeration") {
    for (int s = 0; s < 50; ++s) {
        const Unitary u = haar_unitary(2, 4500 + s);
        REQUIRE(std::fabs(unambiguous_no_ent(u).probability - qubit_unambiguous(u, false)) <=
                1e-8);
    }
    for (int s = 0; s < 8; ++s) {
        const Unitary u = haar_unitary(2, 4550 + s);
        REQUIRE(std::fabs(unambiguous_entassisted(u).probability -
                          qubit_unambiguous(u, true)) <= 1e-4);
    }
    REQUIRE(qubit_unambiguous(named_family(Family::hadamard, 2), false) ==
            Catch::Approx(0.25).margin(1e-12));
    REQUIRE(qubit_unambiguous(named_family(Family::hadamard, 2), true) ==
            Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)).margin(1e-12));
    REQUIRE(qubit_unambiguous(named_family(Family::identity, 2), false) == 0.0);
    REQUIRE(qubit_unambiguous(named_family(Family::permutation, 2, {2, 1}), false) == 1.0);
    REQUIRE_THROWS_AS(qubit_unambiguous(named_family(Family::identity, 3), true),
                      DimensionMismatchError);
}

TEST_CASE("jaeger-shimony bound") {
    REQUIRE(jaeger_shimony(0.0, 0.3) == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(jaeger_shimony(1.0, 0.5) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(jaeger_shimony(0.5, 0.5) == Catch::Approx(0.5).margin(1e-15));

    // The piecewise branches join continuously.
    const double c = 0.6;
    const double lo = c * c / (1.0 + c * c), hi = 1.0 / (1.0 + c * c);
    REQUIRE(jaeger_shimony(c, lo - 1e-9) == Catch::Approx(jaeger_shimony(c, lo + 1e-9)).margin(1e-7));
    REQUIRE(jaeger_shimony(c, hi - 1e-9) == Catch::Approx(jaeger_shimony(c, hi + 1e-9)).margin(1e-7));

    // Middle-branch value never exceeded anywhere in eta.
    for (double eta : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95})
        REQUIRE(jaeger_shimony(c, eta) <= 1.0 - 2.0 * c * std::sqrt(eta * (1.0 - eta)) + 1e-12);

    REQUIRE_THROWS_AS(jaeger_shimony(-0.1, 0.5), OutOfRangeError);
    REQUIRE_THROWS_AS(jaeger_shimony(1.1, 0.5), OutOfRangeError);
    REQUIRE_THROWS_AS(jaeger_shimony(0.5, 0.0), OutOfRangeError);
    REQUIRE_THROWS_AS(jaeger_shimony(0.5, 1.0), OutOfRangeError);
}

TEST_CASE("pseudo-inverse route agrees with the compressed-norm route") {
    // Identity at the empty pair.
    const Unitary id = named_family(Family::identity, 3);
    REQUIRE(unambiguous_no_ent_pinv(id, {}, {}) == Catch::Approx(0.0).margin(1e-12));

    // Hadamard at the optimal subsets.
    const Unitary had = named_family(Family::hadamard, 2);
    REQUIRE(unambiguous_no_ent_pinv(had, {}, {0}) == Catch::Approx(0.25).margin(1e-9));

    // Exhaustive agreement across every assignment at d = 3.
    const Unitary u = haar_unitary(3, 4600);
    for (int code = 0; code < 27; ++code) {
        std::vector<int> gamma, delta;
        int rest = code;
        for (int i = 0; i < 3; ++i, rest /= 3) {
            if (rest % 3 == 1) gamma.push_back(i);
            if (rest % 3 == 2) delta.push_back(i);
        }
        const double direct = detail::subset_candidate(u, gamma, delta).value;
        const double pinv = unambiguous_no_ent_pinv(u, gamma, delta);
        INFO("code=" << code << " direct=" << direct << " pinv=" << pinv);
        REQUIRE(std::fabs(direct - pinv) <= 1e-8);
    }

    REQUIRE_THROWS_AS(unambiguous_no_ent_pinv(id, {0, 1}, {1}), BadParamsError);
    REQUIRE_THROWS_AS(unambiguous_no_ent_pinv(id, {5}, {}), BadParamsError);

    // A pencil eigenvalue inside the tolerance band is rejected.
    const Unitary near_swap = named_family(Family::rotation, 2, {kPi / 2 - 1e-5});
    REQUIRE_THROWS_AS(unambiguous_no_ent_pinv(near_swap, {0}, {1}), SingularPencilError);
}

TEST_CASE("parallel queries") {
    const Unitary had = named_family(Family::hadamard, 2);

    // Two copies of the Hadamard measurement are perfectly distinguishable
    // without entanglement, with the singlet-like input.
    const auto two = unambiguous_parallel(had, 2, false);
    REQUIRE(two.probability == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(two.strategy->gamma == std::vector<int>{0, 3});
    REQUIRE(two.strategy->delta == std::vector<int>{1, 2});
    CVec target = CVec::Zero(4);
    target[0] = 1.0 / std::sqrt(2.0);
    target[3] = -1.0 / std::sqrt(2.0);
    REQUIRE((target.adjoint() * two.optimal_input.mat() * target).value().real() ==
            Catch::Approx(1.0).margin(1e-6));

    REQUIRE(unambiguous_parallel(had, 2, true).probability ==
            Catch::Approx(1.0).margin(1e-7));
    REQUIRE(unambiguous_parallel(named_family(Family::identity, 2), 2, true).probability ==
            Catch::Approx(0.0).margin(1e-9));

    // Single copy reduces to the single-shot operation.
    REQUIRE(unambiguous_parallel(had, 1, true).probability ==
            Catch::Approx(unambiguous_entassisted(had).probability).margin(1e-8));

    REQUIRE_THROWS_AS(unambiguous_parallel(named_family(Family::identity, 3), 3, true),
                      DimensionTooLargeError);
    REQUIRE_THROWS_AS(unambiguous_parallel(had, 0, true), BadShotCountError);
}

TEST_CASE("more copies never hurt") {
    for (int s = 0; s < 6; ++s) {
        const Unitary u = haar_unitary(2, 4700 + s);
        const double one = unambiguous_parallel(u, 1, true).probability;
        const double two = unambiguous_parallel(u, 2, true).probability;
        INFO("s=" << s << " one=" << one << " two=" << two);
        REQUIRE(two >= one - 1e-8);
    }
}

TEST_CASE("probabilities are invariant under diagonal right factors") {
    const Unitary u = haar_unitary(3, 4800);
    const CMat e = CVec(Eigen::Vector3cd(std::polar(1.0, 0.7), std::polar(1.0, -1.3),
                                         std::polar(1.0, 2.1)))
                       .asDiagonal();
    const Unitary ue(u.mat() * e);

    REQUIRE(std::fabs(unambiguous_no_ent(u).probability -
                      unambiguous_no_ent(ue).probability) <= 1e-10);
    REQUIRE(std::fabs(unambiguous_entassisted_closed(u) -
                      unambiguous_entassisted_closed(ue)) <= 1e-8);
    REQUIRE(std::fabs(unambiguous_entassisted(u).probability -
                      unambiguous_entassisted(ue).probability) <= 1e-8);
}

TEST_CASE("dimension guard for the subset enumeration") {
    REQUIRE_THROWS_AS(unambiguous_no_ent(named_family(Family::identity, 13)),
                      DimensionTooLargeError);
}
