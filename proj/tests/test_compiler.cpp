#include <doctest.h>

#include <numbers>
#include <random>

#include "ggc/compiler.hpp"
#include "ggc/io.hpp"
#include "ggc/simulate.hpp"

using namespace ggc;

namespace {

CompileOptions fast_opts()
{
    CompileOptions opts;
    opts.c = 0.5;
    opts.margin = 2.0;
    opts.structured = true;
    return opts;
}

} // namespace

TEST_CASE("group commutator of equal generators collapses to identity")
{
    MatC x(2, 2);
    x << 1.0, cxd(0.3, 0.1), cxd(0.3, -0.1), -0.5;
    CHECK(group_commutator_error_dense(x, x, 16) < 1e-12);
}

TEST_CASE("single-qubit commutator product converges at the promised rate")
{
    MatC sx(2, 2), sy(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, cxd(0, -1), cxd(0, 1), 0;
    double err = group_commutator_error_dense(sx, sy, 10000);
    // c M^3 N^{-1/2} with M = 1: the distance sits well under 2 * 0.01.
    CHECK(err < 0.02);
    CHECK(err > 1e-5); // and the product is not trivially exact
    CHECK_THROWS_AS(group_commutator_error_dense(sx, sy, 1), InvalidArgument);
}

TEST_CASE("commutator sweep fits the inverse-square-root exponent")
{
    SweepReport rep = commutator_sweep({16, 64, 256, 1024, 4096}, 2, 0x5eedULL);
    CHECK(rep.slope == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(rep.c_estimate > 0.05);
    CHECK(rep.c_estimate < 5.0);
    CHECK(rep.c_calibrated == doctest::Approx(2.0 * rep.c_estimate));
}

TEST_CASE("zero target compiles to the empty sequence")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    PulseSequence seq = compile_local_xy_gate(sc, Point{0}, sc.base, 0.0, 0.2, W, fast_opts());
    CHECK(seq.nodes.empty());
    CHECK(seq.flat_length() == 0);
}

TEST_CASE("compile preconditions")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CHECK_THROWS_AS(compile_local_xy_gate(sc, Point{0}, sc.base, cxd(1.5, 0), 0.2, W, fast_opts()),
                    InvalidArgument);
    CHECK_THROWS_AS(compile_local_xy_gate(sc, Point{0}, sc.base, cxd(0.5, 0), 0.0, W, fast_opts()),
                    InvalidArgument);
    // Non-addressable point: the chain's interior.
    Scheme chain = make_builtin_scheme("chain-12");
    BalanceFunction Wc = BalanceFunction::constant(chain.domain.size());
    CHECK_THROWS_AS(
        compile_local_xy_gate(chain, Point{4}, chain.base, cxd(0.5, 0), 0.2, Wc, fast_opts()),
        InvalidArgument);
}

TEST_CASE("two-reference compile meets its error budget, measured")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    cxd z(0, -std::numbers::pi / 4.0);
    PulseSequence seq = compile_local_xy_gate(sc, Point{0}, sc.base, z, 0.2, W, fast_opts());

    // The closed form L_i = 2 N_i (1 + L_{i+1}) counts the emitted pulses
    // exactly.
    double n1 = double(seq.trace.levels[0].N), n2 = double(seq.trace.levels[1].N);
    CHECK(seq.flat_length() == 2.0 * n1 * (1.0 + 4.0 * n2));
    CHECK(seq.trace.closed_form_length == seq.flat_length());
    std::vector<Pulse> flat = seq.flatten(1'000'000);
    CHECK(double(flat.size()) == seq.flat_length());

    SimReport rep = measure_sequence(sc, W, seq);
    CHECK(rep.distance <= seq.trace.predicted_error + 1e-9);
    CHECK(rep.distance <= 0.2);
    CHECK(rep.leakage < 0.2);
}

TEST_CASE("three-reference compile meets its error budget, measured")
{
    Scheme sc = make_builtin_scheme("line-k3");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    cxd z(0, -std::numbers::pi / 4.0);
    PulseSequence seq = compile_local_xy_gate(sc, Point{0}, sc.base, z, 0.3, W, fast_opts());
    CHECK(seq.trace.levels.size() == 3);

    double expect = 1.0;
    for (auto it = seq.trace.levels.rbegin(); it != seq.trace.levels.rend(); ++it)
        expect = 2.0 * double(it->N) * (1.0 + expect);
    CHECK(seq.flat_length() == expect);

    SimReport rep = measure_sequence(sc, W, seq);
    CHECK(rep.distance <= 0.3);
    CHECK(rep.distance <= seq.trace.predicted_error + 1e-9);
    CHECK(rep.leakage < 0.1);
}

TEST_CASE("mirrored subsequences invert each other exactly")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    PulseSequence seq =
        compile_local_xy_gate(sc, Point{0}, sc.base, cxd(0.3, 0.2), 0.2, W, fast_opts());
    const auto& period = seq.nodes[0].body;
    // Slots 0 and 2 hold the level-2 gate and its mirror.
    std::vector<SeqNode> fwd = {period[0]};
    std::vector<SeqNode> bwd = {period[2]};
    CHECK(sequence_tree_hash(inverse_sequence(fwd)) == sequence_tree_hash(bwd));

    SequenceSimulator sim(sc, W, SimOptions{});
    MatC a = sim.full_unitary(fwd);
    MatC b = sim.full_unitary(bwd);
    CHECK((a * b - MatC::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("proof schedule refuses desk-scale nesting")
{
    // Under the per-factor additivity schedule the second level needs
    // N ~ (N_1 / eps)^2 periods; the refusal carries the required count.
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CompileOptions opts = fast_opts();
    opts.schedule = CompileOptions::Schedule::Proof;
    opts.structured = false;
    try {
        compile_local_xy_gate(sc, Point{0}, sc.base, cxd(0, -0.5), 0.2, W, opts);
        FAIL("expected refusal");
    } catch (const CompileRefused& e) {
        CHECK(e.info.level == 2);
        CHECK(e.info.required_N > 1e6);
    }
}

TEST_CASE("flat emission cap refuses oversized sequences")
{
    Scheme sc = make_builtin_scheme("line-k3");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CompileOptions opts = fast_opts();
    opts.structured = false; // flat caps apply
    CHECK_THROWS_AS(compile_local_xy_gate(sc, Point{0}, sc.base, cxd(0, -0.5), 0.3, W, opts),
                    CompileRefused);
}

TEST_CASE("euler decomposition reproduces special unitaries")
{
    auto rx = [](double t) {
        MatC m(2, 2);
        m << cxd(std::cos(t / 2), 0), cxd(0, -std::sin(t / 2)), cxd(0, -std::sin(t / 2)),
            cxd(std::cos(t / 2), 0);
        return m;
    };
    auto ry = [](double t) {
        MatC m(2, 2);
        m << cxd(std::cos(t / 2), 0), cxd(-std::sin(t / 2), 0), cxd(std::sin(t / 2), 0),
            cxd(std::cos(t / 2), 0);
        return m;
    };
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        double a = nd(rng), b = nd(rng), c = nd(rng);
        MatC rz(2, 2);
        rz << std::exp(cxd(0, -c / 2)), 0, 0, std::exp(cxd(0, c / 2));
        MatC u = rx(a) * ry(b) * rz;
        auto [alpha, beta, gamma] = euler_xyx(u);
        MatC rebuilt = rx(gamma) * ry(beta) * rx(alpha);
        CHECK((rebuilt - u).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(euler_xyx(2.0 * MatC::Identity(2, 2)), InvalidArgument);
}

TEST_CASE("compiled z-rotation matches its target on the admissible block")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    double theta = 0.9;
    MatC rz(2, 2);
    rz << std::exp(cxd(0, -theta / 2)), 0, 0, std::exp(cxd(0, theta / 2));
    PulseSequence seq = compile_local_unitary(sc, Point{0}, sc.base, rz, 0.3, W, fast_opts());
    CHECK(seq.trace.levels.size() >= 4); // at least two xy rotations, two levels each
    SimReport rep = measure_sequence(sc, W, seq);
    CHECK(rep.distance <= 0.3);
}

TEST_CASE("identity target produces no pulses")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    PulseSequence seq =
        compile_local_unitary(sc, Point{0}, sc.base, MatC::Identity(2, 2), 0.3, W, fast_opts());
    CHECK(seq.nodes.empty());
}

TEST_CASE("rx target uses a single xy rotation")
{
    Scheme sc = make_builtin_scheme("mini-k2");
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    MatC u = rotation_2x2(cxd(0, -0.4)); // Rx(0.8)
    PulseSequence seq = compile_local_unitary(sc, Point{0}, sc.base, u, 0.3, W, fast_opts());
    CHECK(seq.trace.levels.size() == 2); // one xy call at two references
    SimReport rep = measure_sequence(sc, W, seq);
    CHECK(rep.distance <= 0.3);
}

TEST_CASE("entangling pulse descriptor lists workspace pairs and constants")
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{12});
    sc.workspace = {Point{0}, Point{4}, Point{8}};
    sc.base = {Point{1}, Point{3}, Point{9}};
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());

    EntanglingInfo info = entangling_pulse(sc, Point{0}, Point{4}, std::numbers::pi, W);
    REQUIRE(info.workspace_pairs.size() == 2); // {0,4} and {4,8}
    CHECK(info.workspace_pairs[0] == std::make_pair(Point{0}, Point{4}));
    CHECK(info.workspace_pairs[1] == std::make_pair(Point{4}, Point{8}));
    CHECK(info.constant_weight == 0.0);
    CHECK_FALSE(info.identity_on_admissible);

    EntanglingInfo zero = entangling_pulse(sc, Point{0}, Point{4}, 0.0, W);
    CHECK(zero.identity_on_admissible);
}

TEST_CASE("entangling pulse refuses without the no-shared-distance condition")
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{16});
    sc.workspace = {Point{0}, Point{4}, Point{8}};
    sc.base = {Point{3}, Point{9}, Point{12}}; // 12 sits one spacing from 8
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    CHECK_THROWS_AS(entangling_pulse(sc, Point{0}, Point{4}, 1.0, W), InvalidArgument);
}

TEST_CASE("entangling pulse applies the simultaneous pair phases")
{
    Scheme sc;
    sc.model = GroupModel::translation(1);
    sc.domain = Domain::box(sc.model, Point{0}, Point{9});
    sc.workspace = {Point{0}, Point{4}, Point{8}};
    sc.base = {Point{1}, Point{3}, Point{9}};
    BalanceFunction W = BalanceFunction::constant(sc.domain.size());
    double T = 0.7;
    EntanglingInfo info = entangling_pulse(sc, Point{0}, Point{4}, T, W);

    SequenceSimulator sim(sc, W, SimOptions{});
    std::vector<SeqNode> nodes = {SeqNode::leaf(info.pulse)};
    double leak = 0;
    MatC block = sim.admissible_block(nodes, &leak);
    CHECK(leak < 1e-12);
    // Diagonal phase -T on every lit class pair among {0,4,8}.
    AdmissibleSpace sp = AdmissibleSpace::from_scheme(sc);
    for (std::uint64_t j = 0; j < sp.dim(); ++j) {
        int b0 = int(j & 1), b4 = int((j >> 1) & 1), b8 = int((j >> 2) & 1);
        int lit_pairs = b0 * b4 + b4 * b8;
        cxd want = std::exp(cxd(0, -T * lit_pairs));
        CHECK(std::abs(block(Eigen::Index(j), Eigen::Index(j)) - want) < 1e-12);
    }
}
