#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prosrs/zoomtree.hpp"

using namespace prosrs;

namespace {

ZoomNode make_node(const BoxDomain& omega, ExploitState s, std::size_t fail = 0) {
  return ZoomNode{.id = 0,
                  .data = EvalDataset(omega.dimension()),
                  .omega = omega,
                  .state = s,
                  .beta = 0.02,
                  .parent = std::nullopt,
                  .children = {},
                  .zoom_level = 0,
                  .fail_counter = fail};
}

EvalDataset points(std::initializer_list<Point> xs) {
  EvalDataset data(xs.begin()->size());
  for (const auto& x : xs) data.add(x, 0.0);
  return data;
}

}  // namespace

TEST_CASE("update_state examples") {
  const RunConfig cfg = default_config(2, 1);  // c_fail = 2, delta_gamma = 2
  SUBCASE("p decays by n_eff^(-1/d)") {
    ZoomNode n = make_node(BoxDomain::cube(2, 0.0, 1.0), {0.0, 1.0, 0.1});
    update_state(n, 16, true, cfg);
    CHECK(n.state.p == 0.25);
    CHECK(n.state.sigma == 0.1);
    CHECK(n.state.gamma == 0.0);
    CHECK(n.fail_counter == 0);
  }
  SUBCASE("streak completes: sigma halves, gamma drops, counter resets") {
    ZoomNode n = make_node(BoxDomain::cube(2, 0.0, 1.0), {0.0, 0.05, 0.1}, cfg.c_fail - 1);
    update_state(n, 3, true, cfg);
    CHECK(n.state.sigma == 0.05);
    CHECK(n.state.gamma == -2.0);
    CHECK(n.fail_counter == 0);
    CHECK(n.state.p == 0.05);
  }
  SUBCASE("success breaks the streak") {
    ZoomNode n = make_node(BoxDomain::cube(2, 0.0, 1.0), {0.0, 0.05, 0.1}, 1);
    update_state(n, 3, false, cfg);
    CHECK(n.fail_counter == 0);
    CHECK(n.state.sigma == 0.1);
    CHECK(n.state.gamma == 0.0);
  }
  ZoomNode n = make_node(BoxDomain::cube(1, 0.0, 1.0), {});
  CHECK_THROWS_AS(update_state(n, 0, false, cfg), InvalidArgument);
}

TEST_CASE("update_state branch table") {
  // Rows: p, fail counter before, failed?, c_fail -> p, sigma, gamma, counter after.
  struct Row {
    double p;
    std::size_t before;
    bool failed;
    std::size_t c_fail;
    double p_after, sigma_after, gamma_after;
    std::size_t after;
  };
  const Row rows[] = {
      {1.0, 0, false, 3, 0.5, 0.1, -1.0, 0},   {1.0, 0, true, 3, 0.5, 0.1, -1.0, 0},
      {0.1, 0, true, 3, 0.05, 0.1, -1.0, 0},   {0.1, 0, false, 3, 0.05, 0.1, -1.0, 0},
      {0.09, 0, true, 3, 0.09, 0.1, -1.0, 1},  {0.09, 1, true, 3, 0.09, 0.1, -1.0, 2},
      {0.09, 2, true, 3, 0.09, 0.05, -4.0, 0}, {0.09, 0, false, 3, 0.09, 0.1, -1.0, 0},
      {0.09, 1, false, 3, 0.09, 0.1, -1.0, 0}, {0.09, 2, false, 3, 0.09, 0.1, -1.0, 0},
      {0.0, 0, true, 1, 0.0, 0.05, -4.0, 0},   {0.0, 0, false, 1, 0.0, 0.1, -1.0, 0},
      {0.05, 1, true, 2, 0.05, 0.05, -4.0, 0}, {0.05, 0, true, 2, 0.05, 0.1, -1.0, 1},
  };
  for (const Row& r : rows) {
    RunConfig cfg = default_config(2, 1);
    cfg.c_fail = r.c_fail;
    cfg.delta_gamma = 3.0;
    ZoomNode n = make_node(BoxDomain::cube(2, 0.0, 1.0), {-1.0, r.p, 0.1}, r.before);
    update_state(n, 4, r.failed, cfg);  // 4^(-1/2) = 0.5
    CAPTURE(r.p);
    CAPTURE(r.before);
    CAPTURE(r.failed);
    CHECK(n.state.p == r.p_after);
    CHECK(n.state.sigma == r.sigma_after);
    CHECK(n.state.gamma == r.gamma_after);
    CHECK(n.fail_counter == r.after);
  }
}

TEST_CASE("state is monotone under repeated updates") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution fail(0.7);
  std::uniform_int_distribution<std::size_t> neff(1, 30);
  const RunConfig cfg = default_config(3, 2);
  ZoomNode n = make_node(BoxDomain::cube(3, 0.0, 1.0), cfg.s_init);
  ExploitState prev = n.state;
  for (int it = 0; it < 300; ++it) {
    update_state(n, neff(rng), fail(rng), cfg);
    CHECK(n.state.p <= prev.p);
    CHECK(n.state.sigma <= prev.sigma);
    CHECK(n.state.gamma <= prev.gamma);
    CHECK(n.state.valid());
    if (n.state.p >= 0.1) CHECK(n.fail_counter == 0);
    prev = n.state;
  }
}

TEST_CASE("effective_n examples") {
  const BoxDomain sq = BoxDomain::cube(2, 0.0, 1.0);
  CHECK(effective_n(points({{0.1, 0.1}, {0.2, 0.3}, {0.4, 0.2}, {0.3, 0.45}}), sq) == 1);
  CHECK(effective_n(points({{0.1, 0.1}, {0.9, 0.3}, {0.4, 0.7}, {0.6, 0.8}}), sq) == 4);
  CHECK(effective_n(points({{0.05}, {0.15}, {0.45}, {0.55}, {0.95}}), BoxDomain::cube(1, 0.0, 1.0)) == 3);
  // Upper boundary belongs to the last cell.
  CHECK(effective_n(points({{1.0, 1.0}, {0.75, 0.75}, {0.0, 0.0}, {0.0, 0.1}}), sq) == 2);
  CHECK(cells_per_dimension(5, 2) == 3);
  CHECK(cells_per_dimension(9, 2) == 3);
  CHECK(cells_per_dimension(10, 2) == 4);
  CHECK(cells_per_dimension(1000, 3) == 10);
  CHECK(cells_per_dimension(1001, 3) == 11);
  CHECK(cells_per_dimension(200, 10) == 2);
}

TEST_CASE("effective_n agrees with explicit cell enumeration and is bounded") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 4;
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 40;
    const BoxDomain dom = BoxDomain::cube(d, -2.0, 3.0);
    EvalDataset data(d);
    oracle::Mat pts;
    for (std::size_t j = 0; j < n; ++j) {
      Point x(d);
      for (auto& v : x) {
        // Some coordinates land exactly on the box faces.
        const double r = u(rng);
        v = r < 0.05 ? 3.0 : (r < 0.1 ? -2.0 : -2.0 + 5.0 * u(rng));
      }
      data.add(x, 0.0);
      pts.push_back(x);
    }
    const std::size_t got = effective_n(data, dom);
    CHECK(got == oracle::occupied_cells(pts, dom.lower(), dom.upper()));
    CHECK(got >= 1);
    CHECK(got <= n);
  }
}

TEST_CASE("restart condition") {
  RunConfig cfg = default_config(1, 1);
  const BoxDomain root1 = BoxDomain::cube(1, 0.0, 100.0);
  auto child1 = [&](double len, std::size_t n) {
    ZoomNode c = make_node(BoxDomain::cube(1, 0.0, len), {});
    for (std::size_t j = 0; j < n; ++j) c.data.add({0.0}, 0.0);
    return c;
  };
  CHECK(restart_condition(child1(0.5, 1), root1, cfg));
  CHECK_FALSE(restart_condition(child1(2.0, 1), root1, cfg));
  CHECK_FALSE(restart_condition(child1(0.5, 0), root1, cfg));
  // Exactly at the threshold the strict inequality fails; just below it holds.
  CHECK_FALSE(restart_condition(child1(1.0, 1), root1, cfg));
  CHECK(restart_condition(child1(std::nextafter(1.0, 0.0), 1), root1, cfg));
  // n = 4 in 1-D: 4^-1 * len < 1  <=>  len < 4.
  CHECK_FALSE(restart_condition(child1(4.0, 4), root1, cfg));
  CHECK(restart_condition(child1(3.999, 4), root1, cfg));

  const BoxDomain root2({0.0, 0.0}, {100.0, 10.0});
  auto child2 = [&](double a, double b) {
    ZoomNode c = make_node(BoxDomain({0.0, 0.0}, {a, b}), {});
    c.data.add({0.0, 0.0}, 0.0);
    return c;
  };
  CHECK(restart_condition(child2(0.5, 0.05), root2, cfg));
  CHECK_FALSE(restart_condition(child2(0.5, 0.2), root2, cfg));  // only dimension 0 below
  CHECK_FALSE(restart_condition(child2(2.0, 0.05), root2, cfg)); // only dimension 1 below
}

TEST_CASE("depth bound") {
  CHECK(max_zoom_level(0.4, 0.01) == 6);
  CHECK(std::log(0.01) / std::log(0.4) == doctest::Approx(5.026).epsilon(1e-3));
  CHECK(max_zoom_level(0.5, 0.25) == 2);
  CHECK(max_zoom_level(0.5, 0.2) == 3);
}

TEST_CASE("zoom_in creates a clipped child and resets the parent") {
  RunConfig cfg = default_config(2, 1);
  EvalDataset init(2);
  init.add({0.9, 0.5}, 1.0);
  init.add({0.1, 0.1}, 2.0);
  init.add({0.8, 0.4}, 3.0);
  ZoomTree tree(BoxDomain::cube(2, 0.0, 1.0), init, cfg);
  tree.current().state = {-4.0, 0.05, 0.0125};
  tree.current().fail_counter = 1;

  ZoomNode& child = tree.zoom_in(Point{0.9, 0.5});
  CHECK(child.omega.lower(0) == doctest::Approx(0.7));
  CHECK(child.omega.upper(0) == 1.0);
  CHECK(child.omega.lower(1) == doctest::Approx(0.3));
  CHECK(child.omega.upper(1) == doctest::Approx(0.7));
  CHECK(child.zoom_level == 1);
  CHECK(child.state == cfg.s_init);
  CHECK(child.beta == cfg.beta_init);
  CHECK(child.data.size() == 2);
  CHECK(tree.current_id() == 1);
  const ZoomNode& root = tree.node(0);
  CHECK(root.state == cfg.s_init);
  CHECK(root.fail_counter == 0);
  CHECK(root.omega.contains(child.omega));
  CHECK_THROWS_AS(tree.zoom_in(Point{0.2, 0.2}), InvalidArgument);
}

TEST_CASE("zoom_in revisits the containing child with the nearest centre") {
  RunConfig cfg = default_config(1, 1);
  EvalDataset init(1);
  init.add({0.3}, 0.0);
  init.add({0.5}, 0.0);
  ZoomTree tree(BoxDomain::cube(1, 0.0, 1.0), init, cfg);
  tree.zoom_in(Point{0.3});  // child 1: [0.1, 0.5]
  tree.current().state = {-2.0, 0.05, 0.05};
  tree.current().fail_counter = 1;
  Rng always(1);
  tree.current().beta = 1.0;
  REQUIRE(tree.maybe_zoom_out(always));
  tree.zoom_in(Point{0.5});  // 0.5 lies in child 1 ([0.1, 0.5]): revisit
  CHECK(tree.current_id() == 1);
  CHECK(tree.size() == 2);
  CHECK(tree.current().beta == 0.5);
  CHECK(tree.current().state == ExploitState{-2.0, 0.05, 0.05});
  CHECK(tree.current().fail_counter == 1);

  // Build a second child overlapping the first and check the nearest-centre rule.
  tree.current().beta = 1.0;
  REQUIRE(tree.maybe_zoom_out(always));
  tree.record({0.62}, 0.0);
  tree.zoom_in(Point{0.62});  // 0.62 not in child 1 -> child 2: [0.42, 0.82]
  CHECK(tree.current_id() == 2);
  tree.current().beta = 1.0;
  REQUIRE(tree.maybe_zoom_out(always));
  tree.record({0.45}, 0.0);
  // 0.45: distance to centre 0.3 is 0.15, to centre 0.62 is 0.17.
  tree.zoom_in(Point{0.45});
  CHECK(tree.current_id() == 1);
  tree.current().beta = 1.0;
  REQUIRE(tree.maybe_zoom_out(always));
  tree.record({0.47}, 0.0);
  // 0.47: 0.17 versus 0.15.
  tree.zoom_in(Point{0.47});
  CHECK(tree.current_id() == 2);
  CHECK(tree.current().data.size() == 4);  // 0.5, 0.62, 0.45, 0.47 from the archive
}

TEST_CASE("revisited beta is floored at beta_min") {
  RunConfig cfg = default_config(1, 1);
  EvalDataset init(1);
  init.add({0.5}, 0.0);
  ZoomTree tree(BoxDomain::cube(1, 0.0, 1.0), init, cfg);
  tree.zoom_in(Point{0.5});
  CHECK(tree.current().beta == 0.02);
  Rng rng(1);
  auto leave = [&] {
    while (!tree.maybe_zoom_out(rng)) {
    }
    REQUIRE(tree.current_id() == 0);
  };
  leave();
  tree.zoom_in(Point{0.5});
  CHECK(tree.current_id() == 1);
  CHECK(tree.current().beta == 0.01);
  leave();
  tree.zoom_in(Point{0.5});
  CHECK(tree.current().beta == 0.01);
}

TEST_CASE("zoom-out probability") {
  RunConfig cfg = default_config(1, 1);
  EvalDataset init(1);
  init.add({0.5}, 0.0);
  ZoomTree base(BoxDomain::cube(1, 0.0, 1.0), init, cfg);
  base.zoom_in(Point{0.5});

  Rng rng(77);
  for (double beta : {0.0, 1.0}) {
    for (int k = 0; k < 100; ++k) {
      ZoomTree t = base;
      t.current().beta = beta;
      CHECK(t.maybe_zoom_out(rng) == (beta == 1.0));
    }
  }
  int moved = 0;
  for (int k = 0; k < 10000; ++k) {
    ZoomTree t = base;
    if (t.maybe_zoom_out(rng)) ++moved;
  }
  CHECK(moved >= 150);
  CHECK(moved <= 250);

  // Root never zooms out.
  ZoomTree root(BoxDomain::cube(1, 0.0, 1.0), init, cfg);
  root.current().beta = 1.0;
  CHECK_FALSE(root.maybe_zoom_out(rng));
}

TEST_CASE("zoom-out refreshes the parent from the archive") {
  RunConfig cfg = default_config(2, 1);
  EvalDataset init(2);
  init.add({0.5, 0.5}, 0.0);
  ZoomTree tree(BoxDomain::cube(2, 0.0, 1.0), init, cfg);
  tree.zoom_in(Point{0.5, 0.5});
  tree.record({0.45, 0.55}, 1.0);
  tree.record({0.6, 0.4}, 2.0);
  CHECK(tree.node(0).data.size() == 1);
  tree.current().beta = 1.0;
  Rng rng(0);
  REQUIRE(tree.maybe_zoom_out(rng));
  CHECK(tree.current_id() == 0);
  CHECK(tree.current().data.size() == 3);
  CHECK(tree.archive().size() == 3);
}
