#include <gtest/gtest.h>

#include <delta_lab/audits.hpp>

using namespace delta_lab;
using namespace delta_lab::audits;

namespace {
AuditReport run(const std::string& id, int64_t box, int64_t qmax, std::vector<int64_t> primes = {}, int rmax = 3) {
    AuditParams p;
    p.box = box, p.qmax = qmax, p.primes = std::move(primes), p.rmax = rmax;
    return lemma_audit(id, p);
}
}  // namespace

TEST(Audits, NVanishing) {
    auto r = run("n-vanishing", 2, 36);
    EXPECT_GT(r.cases, 0);
    EXPECT_EQ(r.violations, 0) << r.first_violation;
}

TEST(Audits, BeachBoundOnSmallPrimes) {
    auto r = run("beach", 2, 1331, {5, 7, 11}, 3);
    EXPECT_GT(r.cases, 0);
    EXPECT_EQ(r.violations, 0) << r.first_violation;
}

TEST(Audits, EdgeBound) {
    auto r = run("s2-edge-bound", 2, 1331, {2, 3, 5, 7, 11});
    EXPECT_GT(r.cases, 0);
    EXPECT_EQ(r.violations, 0) << r.first_violation;
}

TEST(Audits, SquareFullSupport) {
    auto r = run("square-full", 1, 128);
    EXPECT_EQ(r.violations, 0) << r.first_violation;
}

TEST(Audits, S2Vanishing) {
    EXPECT_EQ(run("s2-coprime-vanishing", 1, 125).violations, 0);
    EXPECT_EQ(run("s2-high-exponent", 1, 256).violations, 0);
}

TEST(Audits, Convolution) {
    auto r = run("convolution", 0, 120);
    EXPECT_GT(r.cases, 0);
    EXPECT_EQ(r.violations, 0) << r.first_violation;
}

TEST(Audits, RatioTrackersReportFiniteSup) {
    for (const char* id : {"basic-bound", "squarefree-bound", "s2-crude-bound", "m12-zero-bound"}) {
        auto r = run(id, 1, 30);
        EXPECT_FALSE(r.exact) << id;
        EXPECT_GT(r.cases, 0) << id;
        EXPECT_TRUE(std::isfinite(r.sup_ratio)) << id;
    }
}

TEST(Audits, EveryIdHasDefaults) {
    for (const auto& id : lemma_ids()) {
        auto p = default_params(id);
        EXPECT_GT(p.qmax, 0) << id;
    }
    EXPECT_THROW(lemma_audit("no-such-lemma", AuditParams{}), std::invalid_argument);
}
