#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "lazybits/monofn.hpp"
#include "lazybits/ratio.hpp"

using namespace lazybits;

namespace {

mpq_class q(const char* s) { return parse_ratio(s); }

std::vector<mpq_class> pt(std::initializer_list<const char*> coords) {
    std::vector<mpq_class> x;
    for (const char* c : coords)
        x.push_back(parse_ratio(c));
    return x;
}

} // namespace

TEST_CASE("h ramps then plateaus") {
    CHECK(eval_h(pt({"0"})) == 0);
    CHECK(eval_h(pt({"1/2"})) == q("3/4"));
    CHECK(eval_h(pt({"1/4", "1/2"})) == q("7/8"));
    // n=1: cap 3/4 reached from min coordinate 1/4 onward
    CHECK(eval_h(pt({"1/4"})) == q("3/4"));
    CHECK(eval_h(pt({"1"})) == q("3/4"));
    // below the knee the ramp is exact
    CHECK(eval_h(pt({"1/8"})) == q("3/8"));
}

TEST_CASE("h cap binds exactly at min >= 2^-(n+1)") {
    for (std::size_t n : {1u, 2u, 3u}) {
        mpz_class den = mpz_class(1) << (n + 1);
        mpq_class knee(1, den);
        knee.canonicalize();
        mpq_class cap(den - 1, den);
        cap.canonicalize();
        std::vector<mpq_class> x(n, mpq_class(1));
        x[0] = knee;
        CHECK(eval_h(x) == cap);
        x[0] = knee / 2;
        CHECK(eval_h(x) < cap);
    }
}

TEST_CASE("builtin point evaluations") {
    auto identity = make_oracle("identity", 1);
    CHECK(identity->eval(pt({"1/4"})) == q("1/4"));

    auto product = make_oracle("product", 2);
    CHECK(product->eval(pt({"1/2", "1/2"})) == q("1/4"));

    auto constant = make_oracle("constant:1/2", 3);
    CHECK(constant->eval(pt({"1/8", "0", "1"})) == q("1/2"));

    auto mean = make_oracle("mean", 2);
    CHECK(mean->eval(pt({"1/2", "1/4"})) == q("1/4"));

    auto min_coord = make_oracle("min_coord", 3);
    CHECK(min_coord->eval(pt({"1/2", "1/4", "3/4"})) == q("1/4"));

    auto hard = make_oracle("hard", 1);
    CHECK(hard->eval(pt({"1/2"})) == q("3/4"));

    auto stair = make_oracle("staircase:3", 1);
    CHECK(stair->eval(pt({"0"})) == 0);
    CHECK(stair->eval(pt({"1/3"})) == q("2/8"));
    CHECK(stair->eval(pt({"1"})) == q("7/8")); // top step flattened
}

TEST_CASE("product clamps just below one") {
    auto product = make_oracle("product", 2);
    mpq_class v = product->eval(pt({"1", "1"}));
    CHECK(v < 1);
    mpz_class den = mpz_class(1) << 62;
    mpq_class cap(den - 1, den);
    cap.canonicalize();
    CHECK(v == cap);
}

TEST_CASE("oracle names echo their spec strings") {
    CHECK(make_oracle("constant:1/2", 1)->name() == "constant:1/2");
    CHECK(make_oracle("staircase:8", 2)->name() == "staircase:8");
    CHECK(make_oracle("hard", 3)->name() == "hard");
}

TEST_CASE("bad oracle specs are rejected") {
    CHECK_THROWS_AS(make_oracle("constant:3/2", 1), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("constant:1", 1), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("staircase:0", 1), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("staircase:77", 1), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("identity", 2), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("nope", 1), std::invalid_argument);
    CHECK_THROWS_AS(make_oracle("hard:3", 1), std::invalid_argument);
}

TEST_CASE("every builtin passes the monotonicity spot check") {
    for (const auto& spec : builtin_oracle_specs()) {
        for (std::size_t n : {1u, 2u, 3u}) {
            if (spec == "identity" && n != 1)
                continue;
            auto f = make_oracle(spec, n);
            auto violation = check_monotone(*f, 2024, 100000);
            CAPTURE(spec);
            CAPTURE(n);
            CHECK(!violation.has_value());
        }
    }
}

namespace {

// wraps a deliberately decreasing function to prove the checker can fail
struct DecreasingOracle final : MonotoneOracle {
    std::size_t arity() const override { return 1; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        return 1 - x[0];
    }
    std::string name() const override { return "decreasing"; }
};

} // namespace

TEST_CASE("monotonicity check catches a decreasing function") {
    DecreasingOracle f;
    auto violation = check_monotone(f, 7, 1000);
    REQUIRE(violation.has_value());
    CHECK(violation->f_lo > violation->f_hi);
    for (std::size_t j = 0; j < violation->lo.size(); ++j)
        CHECK(violation->lo[j] <= violation->hi[j]);
}

TEST_CASE("exact integrals of the one-dimensional builtins") {
    auto identity = make_oracle("identity", 1);
    CHECK(identity->integral(0, 1) == q("1/2"));
    CHECK(identity->integral(q("1/4"), q("1/2")) == q("3/32"));

    auto hard = make_oracle("hard", 1);
    CHECK(hard->integral(0, 1) == q("21/32"));
    CHECK(hard->integral(0, q("1/4")) == q("3/32"));
    CHECK(hard->integral(q("1/4"), 1) == q("9/16"));

    auto constant = make_oracle("constant:1/3", 1);
    CHECK(constant->integral(q("1/4"), q("3/4")) == q("1/6"));

    auto mean = make_oracle("mean", 1);
    CHECK(mean->integral(0, 1) == q("1/4"));

    auto stair = make_oracle("staircase:2", 1);
    // steps 0,1/4,2/4 then the flattened top 3/4 over [3/4,1)
    CHECK(stair->integral(0, 1) == q("0/4") * q("1/4") + q("1/4") * q("1/4") +
                                       q("2/4") * q("1/4") + q("3/4") * q("1/4"));
    CHECK(stair->integral(q("1/8"), q("3/8")) ==
          q("0/4") * q("1/8") + q("1/4") * q("1/8"));

    auto product = make_oracle("product", 1);
    CHECK(product->integral(0, q("1/2")) == q("1/8"));
}

TEST_CASE("identity bin masses under the normalized density") {
    // density 2x: bin [i/10,(i+1)/10) has mass (2i+1)/100
    auto identity = make_oracle("identity", 1);
    mpq_class total = identity->integral(0, 1);
    for (int i = 0; i < 10; ++i) {
        mpq_class lo(i, 10), hi(i + 1, 10);
        lo.canonicalize();
        hi.canonicalize();
        mpq_class mass = identity->integral(lo, hi) / total;
        mpq_class expect(2 * i + 1, 100);
        expect.canonicalize();
        CHECK(mass == expect);
    }
}

TEST_CASE("integral argument validation") {
    auto identity = make_oracle("identity", 1);
    CHECK_THROWS_AS(identity->integral(q("1/2"), q("1/4")), std::invalid_argument);
    CHECK_THROWS_AS(identity->integral(0, q("3/2")), std::invalid_argument);
    auto product3 = make_oracle("product", 3);
    CHECK(!product3->has_integral());
    CHECK_THROWS_AS(product3->integral(0, 1), std::logic_error);
}

TEST_CASE("grid function evaluates cells and clamped lattice points") {
    // dims (2,2): cells (x1 fast) values monotone
    GridFunction g({2, 2}, {0, 1});
    CHECK(g.arity() == 1);
    std::vector<long> idx{0};
    CHECK(g.cell(idx) == 0);
    idx[0] = 1;
    CHECK(g.cell(idx) == 1);
    std::vector<long> p{0};
    CHECK(g.lattice(p) == 0);
    p[0] = 2; // clamps to last cell
    CHECK(g.lattice(p) == 1);
    CHECK_THROWS_AS(g.lattice(std::vector<long>{3}), std::out_of_range);
}

TEST_CASE("grid rejects non-monotone values") {
    CHECK_THROWS_AS(GridFunction({2, 2}, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction({2, 2, 3}, {0, 1, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction({2, 2}, {0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction({2, 2}, {0}), std::invalid_argument);
}

TEST_CASE("random staircases are monotone and deterministic") {
    // wide output range: running-max flattening on a small grid can make
    // narrow-range staircases from different seeds collide
    auto a = random_staircase(11, {4, 3, 64});
    auto b = random_staircase(11, {4, 3, 64});
    CHECK(a.values() == b.values());
    auto c = random_staircase(12, {4, 3, 64});
    CHECK(a.values() != c.values());

    // componentwise nondecreasing along both axes
    for (long i = 0; i < 4; ++i)
        for (long j = 0; j < 3; ++j) {
            std::vector<long> idx{i, j};
            long v = a.cell(idx);
            CHECK(v >= 0);
            CHECK(v <= 64);
            if (i + 1 < 4) {
                std::vector<long> right{i + 1, j};
                CHECK(a.cell(right) >= v);
            }
            if (j + 1 < 3) {
                std::vector<long> up{i, j + 1};
                CHECK(a.cell(up) >= v);
            }
        }
}

TEST_CASE("singleton grid is a single constant cell") {
    auto g = random_staircase(3, {1, 1});
    CHECK(g.values().size() == 1);
    std::vector<long> p{0};
    long v = g.lattice(p);
    p[0] = 1;
    CHECK(g.lattice(p) == v);
}
