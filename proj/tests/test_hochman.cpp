#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canclab/hochman.hpp"
#include "canclab/seqgen.hpp"

#include <cmath>

using namespace canclab;
using namespace canclab::symbolic;

TEST_CASE("periodic word symbols and materialization") {
  PeriodicWord w{"aab", 1, 10};  // starts at shift 1: a b a a b a a b a a
  CHECK(sw_length(StreamWord(w)) == 10);
  CHECK(sw_materialize(StreamWord(w)) == "abaabaabaa");
  CHECK(w.at(1) == 'a');
  CHECK(w.at(2) == 'b');
  CHECK(w.at(10) == 'a');
}

TEST_CASE("analytic window genericity matches the string implementation") {
  auto ab = FreqOracle::exact_periodic("ab");
  for (std::size_t shift : {std::size_t(0), std::size_t(1)}) {
    for (std::size_t M : {4, 8, 12, 20, 30}) {
      for (double eps : {0.5, 0.34, 0.25, 0.2}) {
        Word window = periodic_prefix("ab", shift, M);
        bool direct = is_eps_generic(window, ab, eps).generic;
        bool analytic = periodic_window_eps_generic("ab", shift, M, eps);
        CHECK(direct == analytic);
      }
    }
  }
  auto aab = FreqOracle::exact_periodic("aab");
  for (std::size_t shift : {0, 1, 2})
    for (std::size_t M : {6, 9, 18, 30})
      for (double eps : {0.5, 0.3, 0.22}) {
        Word window = periodic_prefix("aab", shift, M);
        CHECK(is_eps_generic(window, aab, eps).generic ==
              periodic_window_eps_generic("aab", shift, M, eps));
      }
}

TEST_CASE("analytic strong genericity matches the scanner on materialized words") {
  auto ab = FreqOracle::exact_periodic("ab");
  for (std::size_t shift : {std::size_t(0), std::size_t(1)}) {
    PeriodicWord w{"ab", shift, 400};
    for (std::uint64_t M : {4, 12, 30}) {
      for (double eps : {0.5, 0.34, 0.2}) {
        auto analytic = strongly_generic_periodic(w, eps, M);
        auto direct = is_strongly_generic(sw_materialize(StreamWord(w)), ab, eps,
                                          static_cast<std::size_t>(M));
        CHECK(analytic.good == direct.good);
        CHECK(analytic.scanned == direct.scanned);
        CHECK(analytic.generic == direct.generic);
      }
    }
  }
}

TEST_CASE("minimal strong window grows with 1/eps and verifies") {
  CHECK(minimal_strong_window("ab", 0.5) == 4);
  CHECK(minimal_strong_window("ab", 0.25) == 12);
  std::uint64_t prev = 0;
  for (int k = 1; k <= 6; ++k) {
    std::uint64_t M = minimal_strong_window("ab", std::ldexp(1.0, -k));
    for (std::size_t r = 0; r < 2; ++r)
      CHECK(periodic_window_eps_generic("ab", r, M, std::ldexp(1.0, -k)));
    CHECK(M >= prev);
    prev = M;
  }
}

TEST_CASE("make_periodic_plan validates cleanly and reports violations when broken") {
  auto plan = make_periodic_plan("ab", 3, 8.0);
  CHECK(validate_plan(plan).empty());

  auto broken = plan;
  broken.scales[1].N = 2;  // violates N > 3*2^k*M and the k*|a| chain
  auto bad = validate_plan(broken);
  CHECK(!bad.empty());
  bool mentions_N = false;
  for (const auto& msg : bad) mentions_N |= msg.find("must exceed") != std::string::npos;
  CHECK(mentions_N);

  auto shrunk = plan;
  std::get<PeriodicWord>(shrunk.scales[0].words[1]).length = 30;  // breaks the 3x chain
  CHECK(!validate_plan(shrunk).empty());
}

TEST_CASE("built point matches the explicit stream expansion") {
  auto plan = make_periodic_plan("ab", 2, 4.0);
  std::vector<Word> stream;
  for (const auto& sc : plan.scales)
    for (const auto& w : sc.words) stream.push_back(sw_materialize(w));
  std::uint64_t T = plan.total_length();
  CHECK(build_hochman_point(plan, T) == expand_split_stream(stream, T));
  CHECK(build_simple_point(plan, T) == expand_concat_stream(stream, T));
  // lazy point accessor agrees with the materialized prefix
  auto x = build_hochman_point(plan, T);
  auto ends = plan.block_ends();
  auto ptrs = plan.stream();
  for (std::uint64_t i = 1; i <= T; i += 7)
    CHECK(plan_point_at(true, i, ends, ptrs) == x[i - 1]);
}

TEST_CASE("stop times sit at block-partial and block-end positions") {
  auto plan = make_periodic_plan("ab", 2, 4.0);
  auto stops = plan_stop_times(plan, 0);
  REQUIRE(stops.size() == 2);
  auto ends = plan.block_ends();
  // scale 1: y (shift 0) starts with the first cover word, block 1
  CHECK(stops[0].block == 1);
  std::uint64_t L1 = sw_length(*plan.stream()[0]);
  CHECK(stops[0].partial == (L1 + 2) / 3);
  CHECK(stops[0].end == ends[0]);
  // scale 2: block 3 (after the two scale-1 words)
  CHECK(stops[1].block == 3);
  std::uint64_t L3 = sw_length(*plan.stream()[2]);
  CHECK(stops[1].partial == ends[1] + (L3 + 2) / 3);
  CHECK(stops[1].end == ends[2]);

  // shifts are read mod p, so 7 behaves like 1
  CHECK(plan_stop_times(plan, 7)[0].block == 2);
  // a shift with no cover word at some scale is a misalignment
  auto mono = plan;
  mono.scales[1].words.pop_back();  // scale 2 loses the shift-1 word
  CHECK_THROWS_AS(plan_stop_times(mono, 1), precondition_error);
}

TEST_CASE("analytic pair measure equals enumeration on a materializable plan") {
  auto plan = make_periodic_plan("ab", 2, 6.0);
  std::uint64_t total = plan.total_length();
  REQUIRE(total < 100000);
  for (bool split : {true, false}) {
    Word x = split ? build_hochman_point(plan, total) : build_simple_point(plan, total);
    for (std::size_t y_shift : {std::size_t(0), std::size_t(1)}) {
      Word y = periodic_prefix("ab", y_shift, static_cast<std::size_t>(total) + 4);
      auto stops = plan_stop_times(plan, y_shift);
      for (const auto& s : stops) {
        for (std::uint64_t stop : {s.partial, s.end}) {
          for (std::size_t k : {std::size_t(1), std::size_t(2), std::size_t(3)}) {
            if (stop + k - 1 > total) continue;  // contract: stops within both lengths
            auto analytic = pair_cylinder_measure(plan, split, y_shift, stop, k);
            auto enumerated = pair_orbital_measures(x, y, {stop}, {stop}, k).family_A[0];
            REQUIRE(analytic.horizon == enumerated.horizon);
            CHECK(analytic.counts == enumerated.counts);  // exact count equality
          }
        }
      }
    }
  }
}

TEST_CASE("orbital masses approach their two limits as the ratio grows") {
  // big final ratio drives family A's diagonal toward 1 and family B toward
  // the 1/3 + 2/3-shifted split
  auto plan = make_periodic_plan("ab", 3, 36.0);
  auto stops = plan_stop_times(plan, 0);
  const auto& last = stops.back();
  auto mA = pair_cylinder_measure(plan, true, 0, last.partial, 2);
  auto mB = pair_cylinder_measure(plan, true, 0, last.end, 2);
  CHECK(mA.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mB.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mA.diagonal_mass() > 0.95);
  CHECK(std::abs(mB.diagonal_mass() - 1.0 / 3.0) < 0.05);
  CHECK(std::abs(mB.shifted_diagonal_mass() - 2.0 / 3.0) < 0.05);
}

TEST_CASE("simple point of the periodic plan is block-phase aligned") {
  // with p-aligned lengths the shift-0 blocks of the simple point show the
  // periodic word itself
  auto plan = make_periodic_plan("ab", 2, 4.0);
  Word x = build_simple_point(plan, plan.total_length());
  auto ends = plan.block_ends();
  // block 1 (shift 0) and block 2 (shift 1): x restricted to block 2 equals
  // the sigma-shifted periodic point at the same global positions
  std::uint64_t L1 = ends[0];
  for (std::uint64_t i = 1; i <= L1; ++i)
    CHECK(x[i - 1] == periodic_prefix("ab", 0, ends.back())[i - 1]);
  for (std::uint64_t i = L1 + 1; i <= ends[1]; ++i)
    CHECK(x[i - 1] == periodic_prefix("ab", 1, ends.back())[i - 1]);
}

TEST_CASE("substituted split point matches an independent parity expansion") {
  // plan over the (ab) orbit; +-1 substitution has zero mean under it
  auto plan = make_periodic_plan("ab", 2, 4.0);
  std::uint64_t T = sw_length(*plan.stream()[0]) + sw_length(*plan.stream()[1]);
  Word xw = build_hochman_point(plan, T);
  std::map<std::string, double> masses{{"a", 0.5}, {"b", 0.5}};
  std::map<std::string, double> sub{{"a", -1.0}, {"b", 1.0}};
  auto stream = [&xw](std::uint64_t i) { return xw[static_cast<std::size_t>(i - 1)]; };
  auto xv = canclab::seqgen::gen_from_symbolic(stream, masses, sub, T, "custom");

  // independent expansion of the first two blocks straight from the piecewise
  // definition: u_j = a for odd j; block 1 shows u, block 2 shows sigma(u),
  // each copying in place up to ceil(L/3) and shifted by one past it
  auto u = [](std::uint64_t j) { return j % 2 == 1 ? -1.0 : 1.0; };
  std::uint64_t L1 = sw_length(*plan.stream()[0]);
  std::uint64_t L2 = sw_length(*plan.stream()[1]);
  for (std::uint64_t i = 1; i <= L1 + L2; ++i) {
    double expect;
    if (i <= L1) {
      std::uint64_t j = i;
      expect = j <= (L1 + 2) / 3 ? u(j) : u(j - 1);
    } else {
      std::uint64_t j = i - L1;
      expect = j <= (L2 + 2) / 3 ? u(j + 1) : u(j);  // sigma(u) starts at u_2
    }
    CHECK(xv.values[i - 1].real() == expect);
  }
}
