#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rinp/io.hpp"
#include "rinp/netmodel.hpp"

using namespace rinp;

namespace {

Network line_net(double cap = 10.0) {
  // 0 -> 1 -> 2, compute at node 1
  Network net;
  net.name = "line3";
  net.resource_types = {"cpu"};
  net.utilization_bound = {1.0};
  net.nodes = {{0, "a", {0.0}}, {1, "b", {8.0}}, {2, "c", {0.0}}};
  net.links = {{0, 0, 1, cap, 0.0}, {1, 1, 2, cap, 0.0}};
  net.finalize();
  return net;
}

}  // namespace

TEST_CASE("mm1 delay on hand example") {
  // f/(C-f) with C=10, f=5 gives exactly 1.0
  CHECK(mm1_delay(10.0, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mm1_delay(10.0, 0.0) == 0.0);
  // C=8, f=6: 6/2 = 3
  CHECK(mm1_delay(8.0, 6.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(mm1_delay(10.0, 10.0), SaturatedLinkError);
  CHECK_THROWS_AS(mm1_delay(10.0, 11.0), SaturatedLinkError);
}

TEST_CASE("piecewise envelope touches the queueing curve at breakpoints") {
  DelayModel pwl = DelayModel::default_pwl();
  REQUIRE(pwl.validate());
  double C = 37.5;
  for (double u : pwl.breakpoints) {
    double f = u * C;
    double exact = u == 0.0 ? 0.0 : mm1_delay(C, f);
    CHECK(std::fabs(pwl_link_delay(C, f, pwl) - exact) <= 1e-12);
  }
}

TEST_CASE("piecewise envelope lower-bounds the queueing curve") {
  DelayModel pwl = DelayModel::default_pwl();
  double C = 12.0;
  for (int i = 0; i <= 200; ++i) {
    double f = C * pwl.u_max() * i / 200.0;
    double lin = pwl_link_delay(C, f, pwl);
    double exact = f == 0.0 ? 0.0 : mm1_delay(C, f);
    CHECK(lin <= exact + 1e-12);
  }
  // at low utilization only the zero-utilization tangent f/C is active,
  // which is strictly below the queueing value
  CHECK(pwl_link_delay(C, 0.05 * C, pwl) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(pwl_link_delay(C, 0.05 * C, pwl) < mm1_delay(C, 0.05 * C));
}

TEST_CASE("piecewise envelope is defined past the cap and keeps growing") {
  DelayModel pwl = DelayModel::default_pwl();
  double C = 10.0;
  double at_cap = pwl_link_delay(C, pwl.u_max() * C, pwl);
  double beyond = pwl_link_delay(C, 1.2 * C, pwl);
  CHECK(std::isfinite(at_cap));
  CHECK(beyond > at_cap);
}

TEST_CASE("network delay sums links and adds propagation") {
  Network net = line_net(10.0);
  net.links[0].prop_delay = 0.25;
  net.links[1].prop_delay = 0.5;
  net.finalize();
  std::vector<double> f = {5.0, 2.0};
  // mm1: 5/5 + 2/8 = 1.25 plus propagation weighted by carried flow
  double base = 1.0 + 0.25;
  double prop = 0.25 * 5.0 + 0.5 * 2.0;
  CHECK(mm1_network_delay(net, f) == doctest::Approx(base + prop).epsilon(1e-12));
  DelayModel pwl = DelayModel::default_pwl();
  CHECK(pwl_delay(net, f, pwl) <= mm1_network_delay(net, f) + 1e-12);
  std::vector<double> sat = {9.9, 0.0};
  CHECK_THROWS_AS(pwl_delay(net, sat, pwl), SaturatedLinkError);
}

TEST_CASE("adjacency is rebuilt in ascending link order") {
  Network net = line_net();
  REQUIRE(net.out_links(0).size() == 1);
  CHECK(net.out_links(0)[0] == 0);
  REQUIRE(net.in_links(2).size() == 1);
  CHECK(net.in_links(2)[0] == 1);
  CHECK(net.out_links(2).empty());
  CHECK(net.is_compute(0, 1));
  CHECK_FALSE(net.is_compute(0, 0));
  CHECK(net.usable_compute(0, 1) == doctest::Approx(8.0));
  net.utilization_bound = {0.5};
  CHECK(net.usable_compute(0, 1) == doctest::Approx(4.0));
  auto cn = net.compute_nodes(0);
  REQUIRE(cn.size() == 1);
  CHECK(cn[0] == 1);
}

TEST_CASE("demand work accounting") {
  Demand d;
  d.id = 0;
  d.src = 0;
  d.dst = 2;
  d.volume = 4.0;
  d.work = {6.0};
  CHECK(d.total_work() == doctest::Approx(6.0));
  d.work = {6.0, 2.5};
  CHECK(d.total_work() == doctest::Approx(8.5));
}

TEST_CASE("active slots of a dynamic demand") {
  DynamicDemand dd;
  dd.demand.id = 0;
  dd.start = 1.2;
  dd.duration = 2.0;
  CHECK(dd.finish() == doctest::Approx(3.2));
  auto slots = dd.active_slots(1.0);
  REQUIRE(slots.size() == 3);
  CHECK(slots[0] == 1);
  CHECK(slots[1] == 2);
  CHECK(slots[2] == 3);

  // demand fully inside one slot
  dd.start = 0.1;
  dd.duration = 0.2;
  slots = dd.active_slots(1.0);
  REQUIRE(slots.size() == 1);
  CHECK(slots[0] == 0);

  // finish exactly on a slot boundary does not spill into the next slot
  dd.start = 0.0;
  dd.duration = 2.0;
  slots = dd.active_slots(1.0);
  REQUIRE(slots.size() == 2);
  CHECK(slots.back() == 1);

  // coarser slots
  dd.start = 1.2;
  dd.duration = 2.0;
  slots = dd.active_slots(2.0);
  REQUIRE(slots.size() == 2);
  CHECK(slots[0] == 0);
  CHECK(slots[1] == 1);
}

TEST_CASE("validation flags structural problems") {
  Network net = line_net();
  Demand d;
  d.id = 0;
  d.src = 0;
  d.dst = 2;
  d.volume = 3.0;
  d.work = {2.0};

  SUBCASE("clean instance validates") {
    Diagnostics diag = validate_network(net, {d});
    CHECK(diag.ok());
  }

  SUBCASE("unreachable destination is an error") {
    Demand back = d;
    back.src = 2;
    back.dst = 0;
    Diagnostics diag = validate_network(net, {back});
    CHECK_FALSE(diag.ok());
    bool found = false;
    for (const auto& item : diag.items)
      if (item.severity == DiagSeverity::error &&
          item.message.find("no path") != std::string::npos)
        found = true;
    CHECK(found);
  }

  SUBCASE("aggregate compute shortfall is an error") {
    Demand heavy = d;
    heavy.work = {100.0};
    Diagnostics diag = validate_network(net, {heavy});
    CHECK_FALSE(diag.ok());
  }

  SUBCASE("saturating volume is an error") {
    Demand big = d;
    big.volume = 25.0;
    big.work = {1.0};
    Diagnostics diag = validate_network(net, {big});
    CHECK_FALSE(diag.ok());
  }

  SUBCASE("malformed link endpoint is an error") {
    Network broken = line_net();
    broken.links[1].dst = 9;
    Diagnostics diag = validate_network(broken, {});
    CHECK_FALSE(diag.ok());
  }
}

TEST_CASE("flow conservation residual") {
  Network net = line_net();
  // 3 units from 0 to 2 along the line: balanced
  std::vector<double> f = {3.0, 3.0};
  CHECK(flow_conservation_residual(net, f, 0, 2, 3.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // drop a unit at the relay node
  f = {3.0, 2.0};
  CHECK(flow_conservation_residual(net, f, 0, 2, 3.0) > 0.9);
}

TEST_CASE("bundled metro topology loads and validates") {
  Network net = load_topology(std::string(RINP_DATA_DIR) + "/metro12.topo.json");
  CHECK(net.nodes.size() == 12);
  CHECK(net.links.size() == 42);
  int computes = 0;
  for (const auto& n : net.nodes)
    if (!n.compute.empty() && n.compute[0] > 0.0) ++computes;
  CHECK(computes == 2);
  Diagnostics diag = validate_network(net, {});
  CHECK(diag.ok());
}
