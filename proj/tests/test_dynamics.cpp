#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "bicon/dynamics.hpp"
#include "fixtures.hpp"

using namespace bicon;

TEST(StepRk4, ZeroLaplacianLeavesStateUnchanged) {
    const Vector x = test::four_agent_x0();
    EXPECT_EQ(step_rk4(Matrix::Zero(4, 4), x, 0.3), x);
}

TEST(StepRk4, DisagreementModeContractsByTaylorPolynomial) {
    Matrix L(2, 2);
    L << 1, -1, -1, 1;
    Vector x(2);
    x << 1, -1;
    // x is an eigenvector with eigenvalue 2, so one step multiplies it by the
    // degree-4 Taylor polynomial of exp(-2 dt).
    const double z = -0.2;
    const double factor = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
    const Vector y = step_rk4(L, x, 0.1);
    EXPECT_NEAR(y[0], factor, 1e-15);
    EXPECT_NEAR(y[1], -factor, 1e-15);
}

TEST(StepRk4, OneStepMatchesExponential) {
    const Matrix L = build_laplacian(test::four_agent());
    const Vector x = test::four_agent_x0();
    EXPECT_LT((step_rk4(L, x, 0.01) - expm_reference(L, 0.01, x)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(StepRk4, RejectsBadInput) {
    const Matrix L = Matrix::Zero(2, 2);
    EXPECT_THROW(step_rk4(L, Vector::Zero(3), 0.1), ContractError);
    EXPECT_THROW(step_rk4(L, Vector::Zero(2), 0.0), ContractError);
    Vector bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    EXPECT_THROW(step_rk4(L, bad, 0.1), NumericError);
}

TEST(ExpmReference, ZeroTimeIsIdentity) {
    const Matrix L = build_laplacian(test::four_agent());
    EXPECT_EQ(expm_reference(L, 0.0, test::four_agent_x0()), test::four_agent_x0());
    EXPECT_THROW(expm_reference(L, -1.0, test::four_agent_x0()), ContractError);
}

TEST(ExpmReference, LongTimeLimitIsBipartiteConsensus) {
    const Matrix L = build_laplacian(test::four_agent());
    Vector limit(4);
    limit << -7.5, 7.5, 7.5, -7.5;
    EXPECT_LT((expm_reference(L, 400.0, test::four_agent_x0()) - limit).cwiseAbs().maxCoeff(), 1e-9);
}

// Independent cross-check against the symmetric eigendecomposition.
TEST(ExpmReference, AgreesWithEigendecompositionAndContracts) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> time(0.0, 30.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = test::random_balanced(rng);
        const Matrix L = build_laplacian(inst.g);
        const double t = time(rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(L);
        const Vector lam = (-t * es.eigenvalues().array()).exp().matrix();
        const Vector expected = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose() * inst.x0;
        const Vector got = expm_reference(L, t, inst.x0);
        EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(got.norm(), inst.x0.norm() * (1 + 1e-14));
    }
}

TEST(SimConfig, Validation) {
    auto c = test::four_agent_config();
    EXPECT_NO_THROW(c.validate(4));
    EXPECT_THROW(c.validate(3), ValidationError);
    auto bad = c;
    bad.T = 0.0;
    EXPECT_THROW(bad.validate(4), ValidationError);
    bad = c;
    bad.dt = 0.0;
    EXPECT_THROW(bad.validate(4), ValidationError);
    bad = c;
    bad.epoch = 0.015;
    EXPECT_THROW(bad.validate(4), ValidationError);
    bad = c;
    bad.epoch = 0.005;
    EXPECT_THROW(bad.validate(4), ValidationError);
    bad = c;
    bad.dt = 0.007;
    EXPECT_THROW(bad.validate(4), ValidationError);
}

TEST(Simulate, NoAttackReachesBipartiteConsensus) {
    const auto g = test::four_agent();
    const auto tr = simulate(g, test::four_agent_config(), AttackStrategy::none(), CostSpec::for_graph(g));
    Vector limit(4);
    limit << -7.5, 7.5, 7.5, -7.5;
    EXPECT_EQ(tr.size(), 6001u);
    EXPECT_DOUBLE_EQ(tr.times.back(), 60.0);
    EXPECT_LT((tr.states.back() - limit).cwiseAbs().maxCoeff(), 1e-3);
    const Vector s = gauge_vector({1, -1, -1, 1});
    const double c0 = s.dot(tr.states.front());
    for (const auto& x : tr.states) EXPECT_LT(std::abs(s.dot(x) - c0), 1e-9);
}

TEST(Simulate, GreedyPermanentHoldsThreeFour) {
    const auto g = test::four_agent();
    const auto tr = simulate(g, test::four_agent_config(), AttackStrategy::greedy(1), CostSpec::for_graph(g));
    for (const auto& a : tr.attacks) ASSERT_EQ(a, (LinkSet{Link(3, 4)}));
    // conservation still holds: the cut graph keeps the same gauge
    const Vector s = gauge_vector({1, -1, -1, 1});
    const double c0 = s.dot(tr.states.front());
    for (const auto& x : tr.states) EXPECT_LT(std::abs(s.dot(x) - c0), 1e-9);
}

TEST(Simulate, ConsensusStateIsEquilibrium) {
    const auto g = test::four_agent();
    auto cfg = test::four_agent_config(5.0);
    cfg.x0 = 3.0 * gauge_vector({1, -1, -1, 1});
    const auto tr = simulate(g, cfg, AttackStrategy::greedy(2, AttackMode::per_epoch), CostSpec::for_graph(g));
    for (const auto& x : tr.states) EXPECT_LT((x - cfg.x0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(tr.total_cost(), 0.0, 1e-12);
}

TEST(Simulate, PerEpochAttacksChangeOnlyAtEpochBoundaries) {
    const auto g = test::four_agent();
    auto cfg = test::four_agent_config(20.0);
    cfg.epoch = 0.5;
    const auto tr = simulate(g, cfg, AttackStrategy::random(7, 1, AttackMode::per_epoch), CostSpec::for_graph(g));
    std::size_t switches = 0;
    for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
        if (tr.attacks[k] != tr.attacks[k - 1]) {
            ++switches;
            EXPECT_EQ(k % 50, 0u) << "switch inside an epoch at step " << k;
        }
        EXPECT_LE(tr.attacks[k].size(), 1u);
    }
    EXPECT_GT(switches, 0u);
}

TEST(Simulate, CumulativeCostNonDecreasing) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = test::random_balanced(rng);
        SimConfig cfg;
        cfg.T = 10.0;
        cfg.dt = 0.01;
        cfg.epoch = 0.1;
        cfg.x0 = inst.x0;
        const auto tr = simulate(inst.g, cfg, AttackStrategy::random(trial, 1, AttackMode::per_epoch), CostSpec::for_graph(inst.g));
        for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_GE(tr.cum_cost[k], tr.cum_cost[k - 1] - 1e-12);
    }
}

TEST(Simulate, DisagreementNonIncreasingWithoutAttack) {
    const auto g = test::four_agent();
    const auto spec = CostSpec::for_graph(g);
    const auto tr = simulate(g, test::four_agent_config(), AttackStrategy::none(), spec);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr.inst_cost[k], tr.inst_cost[k - 1] + 1e-10);
}

TEST(Simulate, GaugeEquivalence) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = test::random_balanced(rng);
        const auto sigma = require_gauge(inst.g);
        const Vector s = gauge_vector(sigma);
        SimConfig cfg;
        cfg.T = 5.0;
        cfg.dt = 0.01;
        cfg.epoch = 0.01;
        cfg.x0 = inst.x0;
        const auto signed_run = simulate(inst.g, cfg, AttackStrategy::none(), std::nullopt);
        cfg.x0 = s.cwiseProduct(inst.x0);
        const auto unsigned_run = simulate(gauge_transform(inst.g, sigma), cfg, AttackStrategy::none(), std::nullopt);
        for (std::size_t k = 0; k < signed_run.size(); ++k) {
            EXPECT_LT((signed_run.states[k] - s.cwiseProduct(unsigned_run.states[k])).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Simulate, IntegratorMatchesExponentialOracle) {
    const auto g = test::four_agent();
    const Matrix L = build_laplacian(g);
    const auto tr = simulate(g, test::four_agent_config(), AttackStrategy::none(), std::nullopt);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        worst = std::max(worst, (tr.states[k] - expm_reference(L, tr.times[k], tr.states[0])).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Simulate, UnbalancedGraphOnlyWithoutAttackOrCost) {
    const auto g = parse_graph("n 3\n1 2 1\n2 3 -1\n1 3 1\n");
    SimConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 0.1;
    cfg.epoch = 0.1;
    cfg.x0 = Vector::Ones(3);
    EXPECT_NO_THROW(simulate(g, cfg, AttackStrategy::none(), std::nullopt));
    EXPECT_THROW(simulate(g, cfg, AttackStrategy::greedy(1), std::nullopt), ValidationError);
    EXPECT_THROW(simulate(g, cfg, AttackStrategy::none(), CostSpec{Kernel{}, Matrix::Identity(3, 3)}), ValidationError);
}

TEST(Simulate, ScheduleContractViolations) {
    const auto g = test::four_agent();
    auto cfg = test::four_agent_config(1.0, 0.1);
    auto sched = AttackSchedule::empty(cfg);
    sched.epochs[3] = {Link(1, 2), Link(3, 4)};
    EXPECT_THROW(simulate(g, cfg, sched, 1, std::nullopt), ContractError);
    sched.epochs[3] = {Link(1, 3)};
    EXPECT_THROW(simulate(g, cfg, sched, 1, std::nullopt), ContractError);
    sched.epochs.pop_back();
    EXPECT_THROW(simulate(g, cfg, sched, 1, std::nullopt), ContractError);
}

TEST(Simulate, BlowUpRaisesNumericErrorWithStep) {
    const auto g = parse_graph("n 2\n1 2 1e200\n");
    SimConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 0.5;
    cfg.epoch = 0.5;
    cfg.x0 = Vector::Zero(2);
    cfg.x0 << 1e200, -1e200;
    try {
        simulate(g, cfg, AttackStrategy::none(), std::nullopt);
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_EQ(e.step(), 1u);
    }
}

TEST(Simulate, DeterministicAcrossRuns) {
    const auto g = test::four_agent();
    const auto spec = CostSpec::for_graph(g);
    auto cfg = test::four_agent_config(10.0);
    cfg.epoch = 0.1;
    const auto a = simulate(g, cfg, AttackStrategy::random(42, 2, AttackMode::per_epoch), spec);
    const auto b = simulate(g, cfg, AttackStrategy::random(42, 2, AttackMode::per_epoch), spec);
    EXPECT_EQ(a.attacks, b.attacks);
    EXPECT_EQ(a.cum_cost, b.cum_cost);
}
