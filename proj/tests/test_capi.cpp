/*
 * Copyright 2026 The desync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "desync/desync.h"

namespace {

void collect(const char* data, size_t size, void* user) { static_cast<std::string*>(user)->append(data, size); }

struct Params {
  desync_params* h = nullptr;
  Params(size_t n, double coupling) { REQUIRE(desync_params_create(n, 1.0, 1.0, coupling, 0.0, &h) == DESYNC_OK); }
  ~Params() { desync_params_destroy(h); }
};

}  // namespace

TEST_CASE("parameter errors carry status and message") {
  desync_params* p = nullptr;
  CHECK(desync_params_create(2, 1.0, 1.0, 0.3, 0.0, &p) == DESYNC_ERR_INVALID_ARGUMENT);
  CHECK(p == nullptr);
  CHECK(std::string(desync_last_error()).find("coupling") != std::string::npos);
}

TEST_CASE("anchors and V through the C interface") {
  Params p(3, -0.3);
  double a[3];
  REQUIRE(desync_sorted_anchor(p.h, a, 3) == DESYNC_OK);
  CHECK(a[0] == 1.0);
  CHECK(a[2] == doctest::Approx(1.0 / 2.19));
  CHECK(desync_sorted_anchor(p.h, a, 2) == DESYNC_ERR_INVALID_ARGUMENT);

  desync_set* set = nullptr;
  REQUIRE(desync_set_create(p.h, &set) == DESYNC_OK);
  CHECK(desync_set_size(set) == 6);
  double anchor[3];
  REQUIRE(desync_set_anchor(set, 5, anchor, 3) == DESYNC_OK);
  double v = -1.0;
  REQUIRE(desync_lyapunov_set(set, anchor, 3, &v) == DESYNC_OK);
  CHECK(v <= 1e-15);
  const double x[3] = {0.1, 0.5, 0.3};
  double vs = 0.0, vf = 0.0;
  REQUIRE(desync_lyapunov_set(set, x, 3, &vs) == DESYNC_OK);
  REQUIRE(desync_lyapunov(p.h, x, 3, &vf) == DESYNC_OK);
  CHECK(vs == doctest::Approx(vf).epsilon(1e-12));
  CHECK(desync_set_anchor(set, 6, anchor, 3) == DESYNC_ERR_INVALID_ARGUMENT);
  desync_set_destroy(set);

  Params big(9, -0.3);
  CHECK(desync_set_create(big.h, &set) == DESYNC_ERR_CAPACITY);
}

TEST_CASE("jump and exclusion through the C interface") {
  Params p(2, -0.2);
  const double x[2] = {1.0, 0.5};
  double y[2];
  REQUIRE(desync_jump(p.h, x, 2, DESYNC_POLICY_LOWEST_INDEX_RESETS, y) == DESYNC_OK);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == doctest::Approx(0.4));
  const double off[2] = {0.2, 0.5};
  CHECK(desync_jump(p.h, off, 2, DESYNC_POLICY_ALL_RESET, y) == DESYNC_ERR_PRECONDITION);
  int inside = -1;
  const double g[2] = {0.0, 1.0};
  REQUIRE(desync_in_exclusion(p.h, g, 2, &inside) == DESYNC_OK);
  CHECK(inside == 1);
}

TEST_CASE("simulate and read back an arc") {
  Params p(2, -0.2);
  const double x0[2] = {0.0, 0.1};
  desync_arc* arc = nullptr;
  REQUIRE(desync_simulate(p.h, nullptr, x0, 2, 10.0, 0, DESYNC_POLICY_LOWEST_INDEX_RESETS, 0, -1.0, &arc) ==
          DESYNC_OK);
  CHECK(desync_arc_jump_count(arc) > 10);
  CHECK(desync_arc_aborted(arc) == 0);
  double t = -1.0, s[2];
  uint64_t j = 99;
  REQUIRE(desync_arc_sample(arc, 0, &t, &j, s, 2) == DESYNC_OK);
  CHECK(t == 0.0);
  CHECK(j == 0);
  CHECK(s[1] == 0.1);
  std::string csv;
  REQUIRE(desync_arc_write_csv(arc, p.h, collect, &csv) == DESYNC_OK);
  CHECK(csv.rfind("t,j,tau_1,tau_2,V\n", 0) == 0);
  std::string jumps;
  REQUIRE(desync_arc_write_jumps_csv(arc, collect, &jumps) == DESYNC_OK);
  CHECK(jumps.find("\n0.90000000000000002,1,2,2,") != std::string::npos);
  desync_arc_destroy(arc);

  const double outside[2] = {0.0, 2.0};
  CHECK(desync_simulate(p.h, nullptr, outside, 2, 10.0, 0, DESYNC_POLICY_LOWEST_INDEX_RESETS, 0, -1.0, &arc) ==
        DESYNC_ERR_DOMAIN);
}

TEST_CASE("perturbations through the C interface") {
  Params p(2, -0.3);
  desync_perturbation* bump = nullptr;
  const double m[2] = {0.1, 0.1};
  REQUIRE(desync_perturbation_create(p.h, "bump", m, 2, &bump) == DESYNC_OK);
  const double x0[2] = {0.2, 0.7};
  desync_arc* a = nullptr;
  REQUIRE(desync_simulate(p.h, bump, x0, 2, 0.0, 5, DESYNC_POLICY_LOWEST_INDEX_RESETS, 0, 0.0, &a) == DESYNC_OK);
  CHECK(desync_arc_jump_count(a) == 5);
  desync_arc_destroy(a);
  desync_perturbation_destroy(bump);
  desync_perturbation* bad = nullptr;
  CHECK(desync_perturbation_create(p.h, "wobble", m, 2, &bad) == DESYNC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("bounds and sums through the C interface") {
  Params p(2, -0.2);
  double m = 0.0, jj = 0.0;
  REQUIRE(desync_convergence_bound(p.h, 0.24, 0.1, 0, &m, &jj) == DESYNC_OK);
  CHECK(m == doctest::Approx(7.8467).epsilon(1e-4));
  CHECK(desync_convergence_bound(p.h, 0.1, 0.24, 0, &m, &jj) == DESYNC_ERR_INVALID_ARGUMENT);
  const double d[2] = {0.120, 0.134};
  double cbar = 0.0, bound = 0.0;
  REQUIRE(desync_flow_cbar(p.h, d, 2, &cbar) == DESYNC_OK);
  CHECK(cbar == doctest::Approx(0.007 * std::sqrt(2.0)));
  REQUIRE(desync_asymptotic_bound(p.h, cbar, &bound) == DESYNC_OK);
  CHECK(bound == doctest::Approx(cbar / 0.2));
  REQUIRE(desync_integrable_bound(p.h, 0.1, &bound) == DESYNC_OK);
  CHECK(bound == doctest::Approx(0.5));
  double s = 0.0;
  REQUIRE(desync_geometric_sum(0.8, 0, 3, &s) == DESYNC_OK);
  CHECK(s == doctest::Approx(2.44));
  CHECK(desync_double_geometric_sum(1.0, 0, 3, &s) == DESYNC_ERR_DOMAIN);
}

TEST_CASE("run driver") {
  const char* cfg = R"({"params": {"n": 2, "coupling": -0.2}, "initial": {"state": [0, 0.1]},
                        "stop": {"max_flow_time": 10}, "analysis": {"c2": 0.24, "c1": 0.1}})";
  std::string out;
  REQUIRE(desync_run("bound", cfg, nullptr, 0, 0, collect, &out) == DESYNC_OK);
  CHECK(out.find("c2=0.23999999999999999\n") != std::string::npos);
  out.clear();
  CHECK(desync_run("bound", "{\"initial\": {}}", nullptr, 0, 0, collect, &out) == DESYNC_ERR_CONFIG);
  CHECK(std::string(desync_last_error()).rfind("initial.state", 0) == 0);
  CHECK(desync_run("dance", cfg, nullptr, 0, 0, collect, &out) == DESYNC_ERR_INVALID_ARGUMENT);
  std::string norm;
  REQUIRE(desync_config_normalize(cfg, collect, &norm) == DESYNC_OK);
  std::string again;
  REQUIRE(desync_config_normalize(norm.c_str(), collect, &again) == DESYNC_OK);
  CHECK(norm == again);
}
