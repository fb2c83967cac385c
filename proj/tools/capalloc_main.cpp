#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "capalloc/campaign.hpp"
#include "capalloc/json_io.hpp"

namespace {

using namespace capalloc;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

std::string product_name(const Network& net, int p) {
  const int m = static_cast<int>(net.edges.size());
  const int e = p % m;
  return "e" + std::to_string(net.edges[e].id) + (p < m ? "+" : "-");
}

void print_flow_row(const Network& net, const FlowVector& v) {
  bool any = false;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (v[p] > 1e-9) {
      std::printf("%s%s:%g", any ? ", " : "", product_name(net, static_cast<int>(p)).c_str(),
                  v[p]);
      any = true;
    }
  }
  if (!any) std::printf("-");
  std::printf("\n");
}

ordered_json flows_json(const Network& net, const FlowVector& v) {
  ordered_json j = ordered_json::object();
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (v[p] > 1e-9) j[product_name(net, static_cast<int>(p))] = v[p];
  }
  return j;
}

struct MechanismReport {
  ordered_json aca;
  ordered_json cca;
};

ordered_json aca_report(const Network& net, const AcaOutcome& out) {
  ordered_json j;
  j["closing_prices_per_round"] = out.closing_prices;
  j["total_payment"] = out.total_payment;
  j["players"] = ordered_json::array();
  for (const auto& p : out.players) {
    ordered_json jp;
    jp["allocation"] = flows_json(net, p.allocation);
    jp["final_flows"] = flows_json(net, p.final_flows);
    jp["consumed"] = p.consumed;
    jp["consumption_utility"] = p.consumption_utility;
    jp["transfer_cost"] = p.transfer_cost;
    jp["inlet_cost"] = p.inlet_cost;
    jp["capacity_payment"] = p.capacity_payment;
    jp["utility"] = p.utility;
    j["players"].push_back(std::move(jp));
  }
  std::vector<FlowVector> alloc, used;
  for (const auto& p : out.players) {
    alloc.push_back(p.allocation);
    used.push_back(p.final_flows);
  }
  const auto [anc, unc] = capacity_ratios(net, alloc, used);
  j["r_anc"] = anc;
  j["r_unc"] = unc;
  return j;
}

ordered_json cca_report(const Network& net, const CcaInstance& inst, const ClearingResult& res,
                        const std::vector<double>& payments,
                        const std::vector<CcaPlayerResult>& eval) {
  ordered_json j;
  j["objective"] = res.objective;
  j["acceptance"] = ordered_json::array();
  for (std::size_t b = 0; b < inst.bids.size(); ++b) {
    if (res.acceptance[b] <= 0) continue;
    const auto& bid = inst.bids[b];
    ordered_json ja;
    ja["player"] = bid.player;
    ja["route"] = bid.route_index;
    ja["bid"] = bid.bid_index;
    ja["quantity"] = bid.quantity;
    ja["price"] = bid.price;
    ja["x"] = res.acceptance[b];
    j["acceptance"].push_back(std::move(ja));
  }
  j["players"] = ordered_json::array();
  for (std::size_t i = 0; i < eval.size(); ++i) {
    ordered_json jp;
    jp["allocation"] = flows_json(net, res.allocated[i]);
    jp["consumed"] = eval[i].consumed;
    jp["consumption_utility"] = eval[i].consumption_utility;
    jp["transfer_cost"] = eval[i].transfer_cost;
    jp["inlet_cost"] = eval[i].inlet_cost;
    jp["vcg_payment"] = payments[i];
    jp["utility"] = eval[i].utility;
    j["players"].push_back(std::move(jp));
  }
  const auto [anc, unc] = capacity_ratios(net, res.allocated, res.allocated);
  j["r_anc"] = anc;
  j["r_unc"] = unc;
  return j;
}

void print_aca_text(const Network& net, const ordered_json& j) {
  std::printf("== Ascending clock auction ==\n");
  int r = 1;
  for (const auto& prices : j["closing_prices_per_round"]) {
    std::printf("round %d closing prices: [", r++);
    for (std::size_t p = 0; p < prices.size(); ++p)
      std::printf("%s%g", p ? " " : "", prices[p].get<double>());
    std::printf("]\n");
  }
  int i = 0;
  for (const auto& jp : j["players"]) {
    std::printf("player %d: allocation ", i++);
    std::string alloc = jp["allocation"].dump();
    std::printf("%s  U_C=%g C_T=%g C_I=%g C_C=%g U=%g\n", alloc.c_str(),
                jp["consumption_utility"].get<double>(), jp["transfer_cost"].get<double>(),
                jp["inlet_cost"].get<double>(), jp["capacity_payment"].get<double>(),
                jp["utility"].get<double>());
  }
  std::printf("total payment: %g   r_ANC=%.4f r_UNC=%.4f\n", j["total_payment"].get<double>(),
              j["r_anc"].get<double>(), j["r_unc"].get<double>());
}

void print_cca_text(const ordered_json& j) {
  std::printf("== Convex combinatorial auction ==\n");
  std::printf("clearing objective: %g\n", j["objective"].get<double>());
  for (const auto& ja : j["acceptance"]) {
    std::printf("  x[player %d, route %d, bid %d] = %.6f (quantity %g, price %g)\n",
                ja["player"].get<int>(), ja["route"].get<int>(), ja["bid"].get<int>(),
                ja["x"].get<double>(), ja["quantity"].get<double>(), ja["price"].get<double>());
  }
  int i = 0;
  for (const auto& jp : j["players"]) {
    std::printf("player %d: allocation %s  U_C=%g C_T=%g C_I=%g VCG=%g U=%g\n", i++,
                jp["allocation"].dump().c_str(), jp["consumption_utility"].get<double>(),
                jp["transfer_cost"].get<double>(), jp["inlet_cost"].get<double>(),
                jp["vcg_payment"].get<double>(), jp["utility"].get<double>());
  }
  std::printf("r_ANC=r_UNC=%.4f\n", j["r_anc"].get<double>());
}

void print_bid_tables(const Network& net, const CcaInstance& inst) {
  const auto j = bids_to_json(net, inst);
  for (const auto& jp : j) {
    std::printf("player %d (node %d):\n", jp["player"].get<int>(), jp["node"].get<int>());
    for (const auto& jr : jp["routes"]) {
      std::string edges;
      for (const auto& e : jr["edges"]) edges += (edges.empty() ? "" : ",") + e.dump();
      std::printf("  route {%s} unit cost %g:", edges.c_str(), jr["unit_cost"].get<double>());
      for (const auto& jb : jr["bids"])
        std::printf(" (%g, %g)", jb["quantity"].get<double>(), jb["price"].get<double>());
      std::printf("\n");
    }
  }
}

struct ExpectedExample {
  // Rule-derived reference values for the bundled network, used as a
  // regression guard.
  std::vector<double> aca_payments{240, 420, 120};
  std::vector<double> aca_utilities{720, 320, 1325};
  std::vector<double> round1_prices{0, 0, 0, 0, 0, 0, 3, 8, 0, 0, 0, 0};
  std::vector<double> cca_payments{117.5, 40, 110};
  std::vector<double> cca_utilities{842.5, 700, 1335};
  double cca_objective = 3145;
};

int check_example(const ordered_json& aca, const ordered_json& cca) {
  const ExpectedExample exp;
  int failures = 0;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      std::fprintf(stderr, "regression check failed: %s\n", what.c_str());
    }
  };
  const auto& prices = aca["closing_prices_per_round"][0];
  for (std::size_t p = 0; p < exp.round1_prices.size(); ++p)
    expect(close(prices[p].get<double>(), exp.round1_prices[p]), "round-1 closing price");
  for (int i = 0; i < 3; ++i) {
    expect(close(aca["players"][i]["capacity_payment"].get<double>(), exp.aca_payments[i]),
           "clock-auction payment of player " + std::to_string(i));
    expect(close(aca["players"][i]["utility"].get<double>(), exp.aca_utilities[i]),
           "clock-auction utility of player " + std::to_string(i));
    expect(close(cca["players"][i]["vcg_payment"].get<double>(), exp.cca_payments[i]),
           "combinatorial-auction payment of player " + std::to_string(i));
    expect(close(cca["players"][i]["utility"].get<double>(), exp.cca_utilities[i]),
           "combinatorial-auction utility of player " + std::to_string(i));
  }
  expect(close(cca["objective"].get<double>(), exp.cca_objective), "clearing objective");
  return failures;
}

StepObserver trace_observer(const Network& net) {
  return [&net](const StepRecord& rec) {
    ordered_json j;
    j["round"] = rec.round;
    j["step"] = rec.step;
    j["prices"] = rec.prices;
    j["bids"] = ordered_json::array();
    for (const auto& b : rec.bids) j["bids"].push_back(flows_json(net, b));
    j["closed"] = ordered_json::array();
    for (int p : rec.closed_products) j["closed"].push_back(product_name(net, p));
    std::printf("%s\n", j.dump().c_str());
  };
}

int run_report(const Network& net, bool do_aca, bool do_cca, bool as_json, bool trace,
               bool bids, int routes_per_consumer, bool check_expected,
               const std::vector<std::vector<Route>>* fixed_routes = nullptr) {
  ordered_json out;
  ordered_json aca_j, cca_j;
  if (do_aca) {
    const auto outcome = run_auction(net, AcaConfig{}, trace ? trace_observer(net) : nullptr);
    aca_j = aca_report(net, outcome);
    out["aca"] = aca_j;
  }
  CcaInstance inst;
  if (do_cca || bids) {
    inst = fixed_routes ? instance_from_routes(net, *fixed_routes)
                        : build_instance(net, routes_per_consumer);
  }
  if (bids && !as_json) print_bid_tables(net, inst);
  if (do_cca) {
    const auto res = clear(net, inst);
    const auto payments = vcg_payments(net, inst, res);
    const auto eval = evaluate_cca(net, inst, res, payments);
    cca_j = cca_report(net, inst, res, payments, eval);
    out["cca"] = cca_j;
  }
  if (bids && as_json) out["bids"] = bids_to_json(net, inst);
  if (as_json) {
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    if (do_aca) print_aca_text(net, aca_j);
    if (do_cca) print_cca_text(cca_j);
  }
  if (check_expected) {
    const int failures = check_example(aca_j, cca_j);
    if (failures > 0) return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity-auction simulator: ascending clock vs convex combinatorial"};
  app.require_subcommand(1);

  std::string mechanism = "both", fixture_path, scenario_path, config_path;
  std::string preset_name = "small", out_dir = "campaign_out";
  int count = 1, workers = 0;
  std::uint64_t seed = 0;
  bool as_json = false, trace = false, bids = false, save_scenarios = false;

  auto* cmd_example = app.add_subcommand("example", "run both mechanisms on the bundled network");
  cmd_example->add_option("--fixture", fixture_path, "network JSON overriding the bundled one");
  cmd_example->add_flag("--json", as_json, "machine-readable report");
  cmd_example->add_flag("--trace", trace, "emit one JSON line per auction step");
  cmd_example->add_flag("--bids", bids, "print the generated bid tables");

  auto* cmd_run = app.add_subcommand("run", "run mechanisms on a scenario file");
  cmd_run->add_option("file", scenario_path, "network/scenario JSON")->required();
  cmd_run->add_option("--mechanism", mechanism, "aca, cca or both")
      ->check(CLI::IsMember({"aca", "cca", "both"}));
  cmd_run->add_flag("--json", as_json, "machine-readable report");
  cmd_run->add_flag("--trace", trace, "emit one JSON line per auction step");
  cmd_run->add_flag("--bids", bids, "print the generated bid tables");

  auto* cmd_campaign = app.add_subcommand("campaign", "Monte Carlo comparison campaign");
  cmd_campaign->add_option("--preset", preset_name, "small, medium, large or xlarge");
  cmd_campaign->add_option("--config", config_path, "campaign spec JSON (flags override)");
  cmd_campaign->add_option("--count", count, "number of scenarios");
  cmd_campaign->add_option("--seed", seed, "base seed; scenario i uses seed+i");
  cmd_campaign->add_option("--mechanism", mechanism, "aca, cca or both")
      ->check(CLI::IsMember({"aca", "cca", "both"}));
  cmd_campaign->add_option("--out", out_dir, "output directory");
  cmd_campaign->add_option("--workers", workers, "worker threads (0 = hardware)");
  cmd_campaign->add_flag("--save-scenarios", save_scenarios,
                         "write each generated scenario as JSON next to the results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (cmd_example->parsed()) {
      const Network net =
          fixture_path.empty() ? example_network() : load_network_file(fixture_path);
      const auto problems = validate(net);
      if (!problems.empty()) {
        std::fprintf(stderr, "invalid network: %s\n", problems[0].c_str());
        return kExitInputError;
      }
      const auto routes = example_routes();
      return run_report(net, true, true, as_json, trace, bids, 10,
                        /*check_expected=*/fixture_path.empty(),
                        fixture_path.empty() ? &routes : nullptr);
    }
    if (cmd_run->parsed()) {
      const Network net = load_network_file(scenario_path);
      const auto problems = validate(net);
      if (!problems.empty()) {
        std::fprintf(stderr, "invalid network: %s\n", problems[0].c_str());
        return kExitInputError;
      }
      return run_report(net, mechanism != "cca", mechanism != "aca", as_json, trace, bids, 10,
                        false);
    }
    // campaign; precedence: command-line flags > config file > preset defaults
    CampaignSpec spec;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::fprintf(stderr, "cannot open %s\n", config_path.c_str());
        return kExitInputError;
      }
      nlohmann::json j;
      in >> j;
      if (j.contains("preset") && cmd_campaign->count("--preset") == 0)
        preset_name = j["preset"].get<std::string>();
      spec.config = preset(preset_name);
      if (j.contains("config")) {
        const auto& c = j["config"];
        if (c.contains("n_v")) spec.config.n_v = c["n_v"].get<int>();
        if (c.contains("n_e")) spec.config.n_e = c["n_e"].get<int>();
        if (c.contains("n_s")) spec.config.n_s = c["n_s"].get<int>();
        if (c.contains("routes_per_consumer"))
          spec.config.routes_per_consumer = c["routes_per_consumer"].get<int>();
      }
      if (j.contains("count") && cmd_campaign->count("--count") == 0) count = j["count"].get<int>();
      if (j.contains("seed") && cmd_campaign->count("--seed") == 0)
        seed = j["seed"].get<std::uint64_t>();
      if (j.contains("mechanism") && cmd_campaign->count("--mechanism") == 0)
        mechanism = j["mechanism"].get<std::string>();
      if (j.contains("out") && cmd_campaign->count("--out") == 0)
        out_dir = j["out"].get<std::string>();
      if (j.contains("workers") && cmd_campaign->count("--workers") == 0)
        workers = j["workers"].get<int>();
      if (j.contains("save_scenarios") && cmd_campaign->count("--save-scenarios") == 0)
        save_scenarios = j["save_scenarios"].get<bool>();
    } else {
      spec.config = preset(preset_name);
    }
    spec.preset_name = preset_name;
    spec.count = count;
    spec.base_seed = seed;
    spec.run_aca = mechanism != "cca";
    spec.run_cca = mechanism != "aca";
    spec.out_dir = out_dir;
    spec.workers = workers;
    spec.save_scenarios = save_scenarios;
    const auto runs = run_campaign(spec);
    write_campaign_outputs(spec, runs);
    const auto stats = aggregate(runs);
    std::printf("campaign done: %d scenarios (preset %s, seed %llu)\n", stats.count,
                spec.preset_name.c_str(), static_cast<unsigned long long>(spec.base_seed));
    if (spec.run_aca)
      std::printf("  mean U_T_ACA=%.1f income=%.1f r_ANC=%.4f r_UNC=%.4f UF=%.1f\n",
                  stats.ut_aca.mean, stats.income_aca.mean, stats.r_anc_aca.mean,
                  stats.r_unc_aca.mean, stats.uf_aca.mean);
    if (spec.run_cca)
      std::printf("  mean U_T_CCA=%.1f income=%.1f r_ANC=%.4f r_UNC=%.4f UF=%.1f\n",
                  stats.ut_cca.mean, stats.income_cca.mean, stats.r_anc_cca.mean,
                  stats.r_unc_cca.mean, stats.uf_cca.mean);
    std::printf("  outputs in %s\n", spec.out_dir.c_str());
    return kExitOk;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailed;
  }
}
