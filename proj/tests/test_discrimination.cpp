#include <catch2/catch_amalgamated.hpp>

#include "vndisc/discrimination.hpp"

using namespace vndisc;

TEST_CASE("unitary diamond distance fixed values") {
    REQUIRE(unitary_diamond_distance(named_family(Family::identity, 2)) ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE(unitary_diamond_distance(named_family(Family::permutation, 2, {2, 1})) ==
            Catch::Approx(2.0).margin(1e-12));
    // diag(1, i): nu = sqrt(2)/2, distance 2*sqrt(1 - 1/2).
    REQUIRE(unitary_diamond_distance(named_family(Family::diag_phases, 2, {0.0, kPi / 2})) ==
            Catch::Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("measurement diamond distance fixed values") {
    REQUIRE(measurement_diamond_distance(named_family(Family::diag_phases, 3,
                                                      {0.3, 2.0, 4.4})) ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE(measurement_diamond_distance(named_family(Family::hadamard, 2)) ==
            Catch::Approx(std::sqrt(2.0)).margin(1e-8));
    REQUIRE(measurement_diamond_distance(named_family(Family::permutation, 2, {2, 1})) ==
            Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("helstrom probability") {
    REQUIRE(helstrom_probability(0.0) == Catch::Approx(0.5));
    REQUIRE(helstrom_probability(2.0) == Catch::Approx(1.0));
    REQUIRE(helstrom_probability(std::sqrt(2.0)) ==
            Catch::Approx(0.5 + std::sqrt(2.0) / 4));
    REQUIRE_THROWS_AS(helstrom_probability(-0.1), OutOfRangeError);
    REQUIRE_THROWS_AS(helstrom_probability(2.1), OutOfRangeError);
}

TEST_CASE("multishot distance fixed values") {
    const Unitary h = named_family(Family::hadamard, 2);
    REQUIRE(multishot_distance(h, 1) == Catch::Approx(std::sqrt(2.0)).margin(1e-8));
    REQUIRE(multishot_distance(h, 2) == 2.0);
    REQUIRE(multishot_distance(named_family(Family::identity, 3), 5) ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE_THROWS_AS(multishot_distance(h, 0), BadShotCountError);
}

TEST_CASE("queries_for_perfect fixed values") {
    REQUIRE_FALSE(queries_for_perfect(named_family(Family::hadamard, 2)).unbounded);
    REQUIRE(queries_for_perfect(named_family(Family::hadamard, 2)).n == 2);
    REQUIRE(queries_for_perfect(named_family(Family::rotation, 2, {kPi / 5})).n == 3);
    REQUIRE(queries_for_perfect(named_family(Family::diag_phases, 2, {0.1, 0.9})).unbounded);
    // 3-cycle: upsilon = 4*pi/3 > pi, one query suffices.
    REQUIRE(queries_for_perfect(named_family(Family::permutation, 3, {2, 3, 1})).n == 1);
}

TEST_CASE("is_perfectly_distinguishable fixed values") {
    const Unitary h = named_family(Family::hadamard, 2);
    REQUIRE_FALSE(is_perfectly_distinguishable(h, 1));
    REQUIRE(is_perfectly_distinguishable(h, 2));
    REQUIRE_FALSE(is_perfectly_distinguishable(named_family(Family::identity, 2), 10));
}

TEST_CASE("multishot monotonicity and exact saturation on random unitaries") {
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial % 3;
        const Unitary u = haar_unitary(d, 5000 + trial);
        const UpsilonResult r = upsilon(u);
        if (r.upsilon <= 1e-8) continue;
        const QueryCount q = queries_from_upsilon(r.upsilon);
        REQUIRE_FALSE(q.unbounded);
        double prev = 0.0;
        for (int n = 1; n <= 6; ++n) {
            const double dist = multishot_distance_from_upsilon(r.upsilon, n);
            REQUIRE(dist >= prev - 1e-12);
            prev = dist;
            if (n >= q.n) {
                REQUIRE(dist == 2.0);
            } else if (n * r.upsilon < kPi - 1e-6) {
                REQUIRE(dist < 2.0);
            }
        }
    }
}

TEST_CASE("measurement distance never exceeds the unitary distance") {
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial % 3;
        const Unitary u = haar_unitary(d, 6000 + trial);
        REQUIRE(measurement_diamond_distance(u) <= unitary_diamond_distance(u) + 1e-9);
    }
}

TEST_CASE("measurement distance absorbs right diagonal phases") {
    for (int trial = 0; trial < 4; ++trial) {
        const int d = 2 + trial % 2;
        const Unitary u = haar_unitary(d, 6500 + trial);
        std::vector<double> ph;
        for (int j = 0; j < d; ++j) ph.push_back(0.9 * j + 0.4 * trial + 0.2);
        const Unitary ue(u.mat() * named_family(Family::diag_phases, d, ph).mat());
        REQUIRE(std::fabs(measurement_diamond_distance(u) -
                          measurement_diamond_distance(ue)) < 1e-8);
    }
}

TEST_CASE("discrimination report invariants") {
    for (int trial = 0; trial < 6; ++trial) {
        const Unitary u = haar_unitary(2 + trial % 2, 7000 + trial);
        const DiscriminationReport rep = discrimination_report(u, 3);
        REQUIRE(rep.helstrom_probability ==
                Catch::Approx(0.5 + rep.measurement_distance / 4).margin(1e-12));
        REQUIRE(rep.measurement_distance <= rep.unitary_distance + 1e-9);
        REQUIRE(rep.shots == 3);
        REQUIRE_FALSE(rep.upsilon_uncertain);
    }
}

TEST_CASE("discriminator state: imperfect rotation case") {
    const Unitary u = named_family(Family::rotation, 2, {kPi / 6});
    const DiscriminatorState s = discriminator_state(u, 1);
    REQUIRE(s.kind == DiscriminatorState::Kind::imperfect);
    REQUIRE(s.weights == std::vector<double>{0.5, 0.5});
    // |tr(rho0 U E0)| must equal cos(upsilon/2) = cos(pi/6).
    REQUIRE(verify_discriminator(u, 1, s) < 1e-7);
    const CMat v = u.mat() * s.e0.mat();
    REQUIRE(std::abs((s.state.mat() * v).trace()) ==
            Catch::Approx(std::cos(kPi / 6)).margin(1e-7));
}

TEST_CASE("discriminator state: Hadamard two copies is the canonical triangle") {
    const Unitary h = named_family(Family::hadamard, 2);
    const DiscriminatorState s = discriminator_state(h, 2);
    REQUIRE(s.kind == DiscriminatorState::Kind::perfect);
    REQUIRE(s.low_copies == std::vector<int>{2, 1, 0});
    REQUIRE(s.weights[0] == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(s.weights[1] == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(s.weights[2] == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(verify_discriminator(h, 2, s) < 1e-7);

    // A wrong state is rejected loudly.
    DiscriminatorState bogus = s;
    bogus.state = DensityMatrix::maximally_mixed(4);
    bogus.rho_low = DensityMatrix::maximally_mixed(2);
    bogus.rho_high = DensityMatrix::maximally_mixed(2);
    REQUIRE(verify_discriminator(h, 2, bogus) > 1e-3);
}

TEST_CASE("discriminator state rejects trivial inputs") {
    REQUIRE_THROWS_AS(discriminator_state(named_family(Family::identity, 2), 1),
                      SaddleInfeasibleError);
    REQUIRE_THROWS_AS(discriminator_state(named_family(Family::hadamard, 2), 0),
                      BadShotCountError);
    REQUIRE_THROWS_AS(discriminator_state(haar_unitary(4, 8), 6), DimensionTooLargeError);
}

TEST_CASE("discriminator state: 3-cycle needs the cluster fallback at one query") {
    const Unitary c3 = named_family(Family::permutation, 3, {2, 3, 1});
    const DiscriminatorState s = discriminator_state(c3, 1);
    REQUIRE(s.kind == DiscriminatorState::Kind::perfect);
    REQUIRE(verify_discriminator(c3, 1, s) < 1e-7);
}

TEST_CASE("discriminator state reconstructs from weights and components") {
    const Unitary u = haar_unitary(2, 8100);
    const int n = 2;
    const DiscriminatorState s = discriminator_state(u, n);
    CMat rebuilt = CMat::Zero(4, 4);
    for (size_t m = 0; m < s.weights.size(); ++m) {
        CMat term = CMat::Identity(1, 1);
        for (int c = 0; c < n; ++c)
            term = kron(term, c < s.low_copies[m] ? s.rho_low.mat() : s.rho_high.mat());
        rebuilt += s.weights[m] * term;
    }
    REQUIRE(max_abs(rebuilt - s.state.mat()) < 1e-10);
    double wsum = 0.0;
    for (double w : s.weights) {
        REQUIRE(w >= 0.0);
        wsum += w;
    }
    REQUIRE(wsum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("perfect witnesses exist whenever perfect discrimination is claimed") {
    for (int trial = 0; trial < 8; ++trial) {
        const int d = 2 + trial % 2;
        const Unitary u = haar_unitary(d, 8200 + trial);
        const UpsilonResult r = upsilon(u);
        if (r.upsilon <= 1e-8) continue;
        const QueryCount q = queries_from_upsilon(r.upsilon);
        if (q.unbounded) continue;
        // Minimal N plus a couple of non-minimal ones (wrap-around regime).
        for (int n : {q.n, q.n + 1, q.n + 2}) {
            double dims = 1;
            for (int k = 0; k < n; ++k) dims *= d;
            if (dims > 1024) continue;
            REQUIRE(is_perfectly_distinguishable(u, n));
            const DiscriminatorState s = discriminator_state(u, n);
            REQUIRE(s.kind == DiscriminatorState::Kind::perfect);
            REQUIRE(verify_discriminator(u, n, s) < 1e-7);
        }
    }
}

TEST_CASE("imperfect discriminator residuals on random unitaries") {
    for (int trial = 0; trial < 6; ++trial) {
        const int d = 2 + trial % 2;
        const Unitary u = haar_unitary(d, 8400 + trial);
        const UpsilonResult r = upsilon(u);
        if (r.upsilon <= 1e-8) continue;
        const QueryCount q = queries_from_upsilon(r.upsilon);
        if (q.unbounded || q.n < 2) continue;
        const int n = q.n - 1;  // strictly imperfect
        const DiscriminatorState s = discriminator_state(u, n);
        REQUIRE(s.kind == DiscriminatorState::Kind::imperfect);
        REQUIRE(verify_discriminator(u, n, s) < 1e-6);
    }
}

TEST_CASE("direct diamond oracle fixed values") {
    REQUIRE(direct_diamond_oracle(named_family(Family::identity, 2),
                                  ChannelKind::unitary_channel) ==
            Catch::Approx(0.0).margin(1e-9));
    REQUIRE(direct_diamond_oracle(named_family(Family::hadamard, 2),
                                  ChannelKind::measurement_channel) ==
            Catch::Approx(std::sqrt(2.0)).margin(1e-3));
    REQUIRE(direct_diamond_oracle(named_family(Family::permutation, 2, {2, 1}),
                                  ChannelKind::measurement_channel) ==
            Catch::Approx(2.0).margin(1e-3));
    REQUIRE_THROWS_AS(direct_diamond_oracle(haar_unitary(5, 3), ChannelKind::unitary_channel, 2),
                      DimensionTooLargeError);
}

TEST_CASE("oracle agrees with the arc-based distances on random unitaries") {
    for (int trial = 0; trial < 12; ++trial) {
        const int d = 2 + trial % 2;
        const Unitary u = haar_unitary(d, 8600 + trial);
        const double direct =
            direct_diamond_oracle(u, ChannelKind::measurement_channel, 1);
        REQUIRE(std::fabs(measurement_diamond_distance(u) - direct) <= 5e-3);
    }
    for (int trial = 0; trial < 4; ++trial) {
        const Unitary u = haar_unitary(3, 8700 + trial);
        const double direct = direct_diamond_oracle(u, ChannelKind::unitary_channel, 1);
        REQUIRE(std::fabs(unitary_diamond_distance(u) - direct) <= 5e-3);
    }
}

TEST_CASE("two-copy product phases are not beaten by a full diagonal grid") {
    int tested = 0;
    for (int seed = 9000; tested < 5; ++seed) {
        const Unitary u = haar_unitary(2, static_cast<std::uint64_t>(seed));
        const double ups = upsilon(u).upsilon;
        if (2 * ups >= kPi - 0.1) continue;  // stay inside the imperfect regime
        ++tested;
        const CMat uu = kron(u.mat(), u.mat());
        const int res = 24;
        double grid_min = std::numeric_limits<double>::infinity();
        std::vector<double> phi(4, 0.0);
        for (int a = 0; a < res; ++a)
            for (int b = 0; b < res; ++b)
                for (int c = 0; c < res; ++c) {
                    phi[1] = kTau * a / res;
                    phi[2] = kTau * b / res;
                    phi[3] = kTau * c / res;
                    grid_min = std::min(grid_min, detail::arc_objective(uu, phi));
                }
        REQUIRE(grid_min >= 2 * ups - 0.03);
    }
}
