#include <doctest.h>

#include <cmath>

#include "testutil.hpp"

using namespace cornercuts;
using testutil::Rng;

namespace {

struct Ex1Benders {
    VrpsdInstance instance = testutil::ex1Instance();
    StateNetwork sn;
    ProblemData dataNoRci;
    ProblemData dataFullRci;

    Ex1Benders()
        : sn(buildStateNetwork(instance)),
          dataNoRci(vrpsdProblemData(instance, sn, false)),
          dataFullRci(vrpsdProblemData(instance, sn, true)) {}
};

} // namespace

TEST_SUITE("benders") {

TEST_CASE("no Fischetti cut above the value function") {
    const Ex1Benders fixture;
    const auto cut =
        separateFischetti(fixture.dataNoRci, testutil::ex1Fig2aX(), 20.0);
    CHECK(!cut.has_value());
}

TEST_CASE("EX1 candidate below f_Y is cut off, membership oracle agrees") {
    const Ex1Benders fixture;
    const VectorXd xBar = testutil::ex1Fig2aX();
    const auto cut = separateFischetti(fixture.dataNoRci, xBar, 0.0);
    REQUIRE(cut.has_value());
    CHECK(cut->evaluate(xBar, 0.0) < -1e-6);
    CHECK(!oracle::epiMembershipY(fixture.dataNoRci, xBar, 0.0));

    // Validity on sampled vertices of Y.
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const VectorXd y =
            testutil::randomVertex(rng, fixture.dataNoRci.yLp);
        const double lhs = cut->alpha.dot(fixture.dataNoRci.Q * y) +
                           cut->alpha0 * fixture.dataNoRci.d.dot(y);
        CHECK(lhs >= cut->beta - 1e-6);
    }
}

TEST_CASE("Lagrangian dual with no linking rows degenerates to two supports") {
    ProblemData data;
    data.c = VectorXd::Ones(1);
    data.d = VectorXd::Ones(3);
    data.T = MatrixXd::Zero(0, 1);
    data.Q = MatrixXd::Zero(0, 3);
    data.h = VectorXd::Zero(0);
    data.xRows = GeneralLp::withVars(1);
    data.xRows.upperBounds(0) = 5;
    data.yLp.constraints.resize(1, 3);
    data.yLp.constraints << 1, 1, 1;
    data.yLp.rhs = VectorXd::Ones(1);
    data.yLp.objective = VectorXd::Zero(3);

    const LagrangianDual dual = solveLagrangianDual(data, data.c, 1.0);
    CHECK(dual.alphaHat.size() == 0);
    CHECK(dual.dualValue == doctest::Approx(0.0 + 1.0));
}

TEST_CASE("Lagrangian LP route needs T = -I and h = 0") {
    Ex1Benders fixture;
    ProblemData data = fixture.dataNoRci;
    data.T = MatrixXd::Identity(data.p(), data.n());
    CHECK_THROWS_AS(solveLagrangianDual(data, data.c, 1.0),
                    StructureUnsupportedError);
}

TEST_CASE("EX1 Lagrangian dual value is 88") {
    const Ex1Benders fixture;
    const LagrangianDual dual =
        solveLagrangianDual(fixture.dataFullRci, fixture.dataFullRci.c, 1.0);
    CHECK(dual.dualValue == doctest::Approx(88.0).epsilon(1e-8));

    // alphaHat attains the dual maximum: sigma_X(c - a) + sigma_Y(Q'a + d)
    // equals the value again.
    const double sigmaX = support(fixture.dataFullRci.xRows,
                                  VectorXd(fixture.dataFullRci.c -
                                           dual.alphaHat));
    const double sigmaY =
        support(fixture.dataFullRci.yLp,
                VectorXd(fixture.dataFullRci.Q.transpose() * dual.alphaHat +
                         fixture.dataFullRci.d));
    CHECK(sigmaX + sigmaY == doctest::Approx(88.0).epsilon(1e-7));
}

TEST_CASE("the paper's alpha1 is itself dual optimal") {
    const Ex1Benders fixture;
    const VectorXd alpha1 = testutil::ex1Alpha1();
    const double sigmaX =
        support(fixture.dataFullRci.xRows,
                VectorXd(fixture.dataFullRci.c - alpha1));
    const double sigmaY =
        support(fixture.dataFullRci.yLp,
                VectorXd(fixture.dataFullRci.Q.transpose() * alpha1 +
                         fixture.dataFullRci.d));
    CHECK(sigmaX == doctest::Approx(88.0).epsilon(1e-8));
    CHECK(sigmaY == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("EX1 Lagrangian cut from alpha1 is violated by 12") {
    const Ex1Benders fixture;
    const Cut cut = lagrangianCut(fixture.dataNoRci, testutil::ex1Alpha1(),
                                  1.0);
    CHECK(cut.beta == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(cut.evaluate(testutil::ex1Fig2aX(), 0.0) ==
          doctest::Approx(-12.0).epsilon(1e-8));
}

TEST_CASE("rho0 = 0 gives a domain-style cut valid on Y") {
    const Ex1Benders fixture;
    const Cut cut =
        lagrangianCut(fixture.dataNoRci, testutil::ex1Alpha2(), 0.0);
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const VectorXd y =
            testutil::randomVertex(rng, fixture.dataNoRci.yLp);
        CHECK(cut.alpha.dot(fixture.dataNoRci.Q * y) >= cut.beta - 1e-6);
    }
}

TEST_CASE("implication: Lagrangian cut plus X-side Fenchel cut reach z_SP") {
    const Ex1Benders fixture;
    const ProblemData &data = fixture.dataFullRci;
    const LagrangianDual dual = solveLagrangianDual(data, data.c, 1.0);
    const Cut lagCut = lagrangianCut(data, dual.alphaHat, 1.0);

    MasterState master = makeMaster(data, 0.0);
    addCutToMaster(master, data, lagCut);
    // X-side Fenchel cut (c - alphaHat)'x >= sigma_X(c - alphaHat).
    const VectorXd fenchel = data.c - dual.alphaHat;
    LpRow row;
    row.sense = RowSense::GreaterEqual;
    row.rhs = support(data.xRows, fenchel);
    for (int j = 0; j < data.n(); ++j) {
        if (fenchel(j) != 0.0) {
            row.coeffs.emplace_back(j, fenchel(j));
        }
    }
    master.relaxation.addRow(std::move(row));

    const MasterSolution sol = solveMaster(master);
    const double dw = oracle::dwBoundEnumeration(fixture.instance);
    CHECK(sol.bound == doctest::Approx(dw).epsilon(1e-6));
    CHECK(dw == doctest::Approx(88.0).epsilon(1e-6));
}

TEST_CASE("corner separation returns nothing when already inside") {
    const Ex1Benders fixture;
    const ProblemData &data = fixture.dataFullRci;
    // theta forced so high that the first candidate lies in epi(f_C).
    MasterState master = makeMaster(data, 1000.0);
    const InteriorPoint interior = relativeInteriorPoint(data);
    const std::vector<Cut> omega = separateCornerBendersCuts(
        master, data, interior, testutil::ex1Alpha1(), 1.0);
    CHECK(omega.empty());
}

TEST_CASE("EX1 corner separation loop reaches the DW bound") {
    const Ex1Benders fixture;
    const ProblemData &data = fixture.dataFullRci;
    MasterState master = makeMaster(data, 0.0);
    const InteriorPoint interior = relativeInteriorPoint(data);
    const std::vector<Cut> omega = separateCornerBendersCuts(
        master, data, interior, testutil::ex1Alpha1(), 1.0);
    CHECK(!omega.empty());
    const MasterSolution terminal = solveMaster(master);
    CHECK(terminal.bound == doctest::Approx(88.0).epsilon(1e-6));

    // Every emitted cut is a Benders cut: valid on all vertices of Y, which
    // at desk scale are the k-scaled path flows.
    for (const auto &entry :
         oracle::enumerateQRouteSequences(fixture.instance)) {
        const VectorXd path =
            testutil::pathFlowOfSequence(fixture.sn, fixture.instance,
                                         entry.route);
        const VectorXd vertex = 2.0 * path;
        const VectorXd w = data.Q * vertex;
        const double theta = data.d.dot(vertex);
        for (const Cut &cut : omega) {
            CHECK(cut.evaluate(w, theta) >= -1e-6);
        }
    }

    // Monotone master bounds along the loop.
    for (size_t i = 1; i < master.log.size(); ++i) {
        CHECK(master.log[i].bound >= master.log[i - 1].bound - 1e-9);
    }
}

} // TEST_SUITE
