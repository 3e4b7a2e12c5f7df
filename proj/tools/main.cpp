// multcorr: logarithmically averaged correlations of bounded multiplicative
// functions, smooth-number densities against Dickmann-rho targets, and
// real-character correlation scans, behind one deterministic CLI.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "multcorr/char_sum.hpp"
#include "multcorr/correlate.hpp"
#include "multcorr/dickmann.hpp"
#include "multcorr/errors.hpp"
#include "multcorr/experiments.hpp"
#include "multcorr/factor_sieve.hpp"
#include "multcorr/mult_func.hpp"
#include "multcorr/parallel.hpp"
#include "multcorr/version.hpp"
#include "output.hpp"

namespace {

using multcorr::DensityEstimate;
using multcorr::MultFuncSpec;
using multcorr::OmegaExpr;
using multcorr::RhoTable;
using multcorr::cli::format_float;
using multcorr::cli::JsonArray;
using multcorr::cli::JsonObject;
using multcorr::cli::parse_count;
using multcorr::cli::parse_int;
using multcorr::cli::parse_real;

// Primary output is buffered so the manifest can carry its checksum.
struct RunContext {
  std::ostringstream out;
  std::string subcommand;
  std::optional<std::uint64_t> seed;
};

void kv(std::ostream& out, const std::string& name, const std::string& value) {
  out << name << " = " << value << "\n";
}

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// experiment plumbing

const std::set<std::string> kConfigKeys = {"x", "omega", "seed", "a", "b",
                                           "c", "d", "k", "l", "alpha",
                                           "eps",  "Q", "h"};

const std::vector<std::string> kExperimentNames = {
    "omega_joint",     "erdos_pomerance", "erdos_turan",        "alpha_shift",
    "hildebrand_rect", "ordering",        "truncated_liouville"};

struct ExperimentArgs {
  std::uint64_t x = 0;
  std::uint64_t seed = 12345;
  std::map<std::string, std::string> params;
};

double need_real(const ExperimentArgs& args, const std::string& name,
                 const std::string& experiment) {
  const auto it = args.params.find(name);
  if (it == args.params.end()) {
    throw std::invalid_argument("experiment '" + experiment +
                                "' requires parameter '" + name + "'");
  }
  return parse_real(it->second, "parameter " + name);
}

int need_int(const ExperimentArgs& args, const std::string& name,
             const std::string& experiment) {
  const auto it = args.params.find(name);
  if (it == args.params.end()) {
    throw std::invalid_argument("experiment '" + experiment +
                                "' requires parameter '" + name + "'");
  }
  return static_cast<int>(parse_int(it->second, "parameter " + name));
}

std::string density_json(const DensityEstimate& e) {
  JsonObject o;
  o.str("label", e.label)
      .unsigned_integer("x", e.x)
      .str("weighting", multcorr::to_string(e.weighting))
      .str("window", multcorr::to_string(e.window))
      .num("estimate", e.estimate);
  if (e.target) o.num("target", *e.target);
  if (e.abs_error) o.num("abs_error", *e.abs_error);
  if (e.target_uncertainty) o.num("target_uncertainty", *e.target_uncertainty);
  return o.done();
}

bool experiment_needs_table(const std::string& name) {
  return name == "omega_joint" || name == "erdos_pomerance" ||
         name == "alpha_shift" || name == "hildebrand_rect";
}

DensityEstimate synthesized_tl_estimate(const ExperimentArgs& args,
                                        double eps, double value) {
  DensityEstimate e;
  e.label = "truncated_liouville[eps=" + fmt_param(eps) + "]";
  e.x = args.x;
  e.weighting = multcorr::Weighting::logarithmic;
  e.window = multcorr::WindowKind::full;
  e.estimate = value;
  return e;
}

// The experiment's headline estimate, used by `experiment sweep`.
DensityEstimate primary_estimate(const std::string& name,
                                 const ExperimentArgs& args,
                                 const RhoTable* table) {
  if (name == "omega_joint") {
    return multcorr::exp_omega_joint(*table, args.x,
                                     need_real(args, "a", name),
                                     need_real(args, "b", name),
                                     need_int(args, "k", name),
                                     need_int(args, "l", name))
        .joint;
  }
  if (name == "erdos_pomerance") {
    return multcorr::exp_erdos_pomerance(*table, args.x,
                                         need_real(args, "a", name),
                                         need_real(args, "b", name));
  }
  if (name == "erdos_turan") return multcorr::exp_erdos_turan(args.x);
  if (name == "alpha_shift") {
    return multcorr::exp_alpha_shift(*table, args.x,
                                     need_real(args, "alpha", name));
  }
  if (name == "hildebrand_rect") {
    return multcorr::exp_hildebrand_rect(*table, args.x,
                                         need_real(args, "a", name),
                                         need_real(args, "b", name),
                                         need_real(args, "c", name),
                                         need_real(args, "d", name));
  }
  if (name == "truncated_liouville") {
    const double eps = need_real(args, "eps", name);
    return synthesized_tl_estimate(
        args, eps, multcorr::exp_truncated_liouville(args.x, eps));
  }
  if (name == "ordering") {
    throw std::invalid_argument(
        "experiment 'ordering' reports a permutation table and cannot be "
        "swept; use `experiment run ordering`");
  }
  const std::string near = multcorr::cli::suggest(name, kExperimentNames);
  std::string msg = "unknown experiment '" + name + "'";
  if (!near.empty()) msg += "; did you mean '" + near + "'?";
  throw std::invalid_argument(msg);
}

void run_experiment(const std::string& name, const ExperimentArgs& args,
                    std::ostream& out) {
  std::optional<RhoTable> table;
  if (experiment_needs_table(name)) table = multcorr::build_rho();

  if (name == "omega_joint") {
    const multcorr::OmegaJointResult r = multcorr::exp_omega_joint(
        *table, args.x, need_real(args, "a", name), need_real(args, "b", name),
        need_int(args, "k", name), need_int(args, "l", name));
    JsonObject o;
    o.raw("joint", density_json(r.joint))
        .raw("marginal1", density_json(r.marginal1))
        .raw("marginal2", density_json(r.marginal2));
    out << o.done() << "\n";
    return;
  }
  if (name == "ordering") {
    const multcorr::OrderingReport r =
        multcorr::exp_ordering(args.x, need_int(args, "k", name));
    JsonArray perms;
    for (const DensityEstimate& e : r.orderings) {
      perms.push_raw(density_json(e));
    }
    JsonObject o;
    o.unsigned_integer("x", r.x)
        .integer("k", r.k)
        .raw("orderings", perms.done())
        .raw("ties", density_json(r.ties));
    out << o.done() << "\n";
    return;
  }
  out << density_json(primary_estimate(name, args, table ? &*table : nullptr))
      << "\n";
}

// ---------------------------------------------------------------------------

struct SweepGrid {
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

SweepGrid parse_sweep(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("--param expects name=lo:hi:step, got '" +
                                text + "'");
  }
  SweepGrid grid;
  grid.param = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  const std::size_t c1 = rest.find(':');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                 : rest.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw std::invalid_argument("--param expects name=lo:hi:step, got '" +
                                text + "'");
  }
  grid.lo = parse_real(rest.substr(0, c1), "sweep lower bound");
  grid.hi = parse_real(rest.substr(c1 + 1, c2 - c1 - 1), "sweep upper bound");
  grid.step = parse_real(rest.substr(c2 + 1), "sweep step");
  if (!(grid.step > 0.0) || grid.hi < grid.lo) {
    throw std::invalid_argument(
        "sweep grid needs step > 0 and lo <= hi, got '" + text + "'");
  }
  return grid;
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("--params expects k=v pairs, got '" +
                                    item + "'");
      }
      out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    pos = comma + 1;
  }
  return out;
}

// Merge config file, --params and dedicated flags (ascending precedence)
// into one experiment argument set.
ExperimentArgs assemble_args(const std::string& config_path,
                             const std::string& params_text,
                             const std::string& x_text,
                             const std::string& seed_text, RunContext& ctx) {
  ExperimentArgs args;
  std::map<std::string, std::string> merged;
  if (!config_path.empty()) {
    merged = multcorr::cli::load_config(config_path, kConfigKeys);
  }
  for (auto& [key, value] : parse_params(params_text)) {
    if (!kConfigKeys.contains(key)) {
      throw std::invalid_argument("unknown parameter '" + key + "'");
    }
    merged[key] = value;
  }
  if (!x_text.empty()) merged["x"] = x_text;
  if (!seed_text.empty()) merged["seed"] = seed_text;

  const auto x_it = merged.find("x");
  if (x_it == merged.end()) {
    throw std::invalid_argument(
        "missing window end: pass --x or set x in the config file");
  }
  args.x = parse_count(x_it->second, "x");
  merged.erase("x");
  const auto seed_it = merged.find("seed");
  if (seed_it != merged.end()) {
    args.seed = parse_count(seed_it->second, "seed");
    merged.erase("seed");
  }
  merged.erase("omega");  // accepted for config compatibility; experiments
                          // in this set are full-window only
  args.params = std::move(merged);
  ctx.seed = args.seed;
  return args;
}

std::string correlate_json(const MultFuncSpec& g1, const MultFuncSpec& g2,
                           std::int64_t h, std::uint64_t x,
                           const OmegaExpr& omega,
                           const multcorr::CorrelationReport& rep) {
  JsonObject o;
  o.str("g1", g1.to_string())
      .str("g2", g2.to_string())
      .integer("h", h)
      .unsigned_integer("x", x)
      .str("omega", omega.to_string())
      .num("omega_value", omega.value_at(x))
      .num("lhs", rep.lhs)
      .num("delta1", rep.delta1)
      .num("delta2", rep.delta2)
      .num("rhs", rep.rhs)
      .num("discrepancy", rep.discrepancy)
      .unsigned_integer("n_terms", rep.n_terms);
  return o.done();
}

int run_main(int argc, char** argv) {
  CLI::App app{
      "multcorr: logarithmic correlations of bounded multiplicative "
      "functions, Dickmann-rho densities, and character-sum scans"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(multcorr::kVersion));
  app.get_formatter()->column_width(30);
  // Long-only help everywhere: the short -h would collide with the --h shift
  // flag of the correlation subcommands.
  app.set_help_flag("--help", "print this help message and exit");
  const auto add_sub = [](CLI::App* parent, const std::string& name,
                          const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->set_help_flag("--help", "print this help message and exit");
    return s;
  };

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = auto; env MULTCORR_THREADS)");

  RunContext ctx;
  std::function<void()> runner;

  // --- factor ------------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "factor", "factor every integer in a half-open range [lo, hi)");
    auto range_text = std::make_shared<std::string>();
    auto segment = std::make_shared<std::string>();
    sub->add_option("--range", *range_text, "half-open range lo:hi")
        ->required();
    sub->add_option("--segment-size", *segment,
                    "sieve segment length (default 2^20)");
    sub->callback([&, range_text, segment] {
      ctx.subcommand = "factor";
      runner = [&, range_text, segment] {
        const std::size_t colon = range_text->find(':');
        if (colon == std::string::npos) {
          throw std::invalid_argument("--range expects lo:hi, got '" +
                                      *range_text + "'");
        }
        multcorr::SieveRequest req;
        req.lo = parse_count(range_text->substr(0, colon), "range start");
        req.hi = parse_count(range_text->substr(colon + 1), "range end");
        if (!segment->empty()) {
          req.segment_size = parse_count(*segment, "--segment-size");
        }
        if (req.hi < req.lo) {
          throw std::invalid_argument("range end precedes range start");
        }
        if (req.hi - req.lo > (std::uint64_t{1} << 27)) {
          throw multcorr::CapacityError(
              "factor --range is limited to 2^27 integers per invocation");
        }
        multcorr::sieve_range(req, [&](multcorr::FactoredSegment&& seg) {
          for (std::uint64_t n = seg.lo(); n < seg.hi(); ++n) {
            ctx.out << n << '\t';
            bool first = true;
            for (const multcorr::PrimePower& pp : seg.factors(n)) {
              if (!first) ctx.out << ' ';
              first = false;
              ctx.out << pp.prime << '^' << pp.mult;
            }
            ctx.out << '\n';
          }
        });
      };
    });
  }

  // --- rho ---------------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "rho", "Dickmann rho: point values or a CSV table");
    struct Opts {
      std::string u_text, table_text, out_path;
      double step = multcorr::kDefaultRhoStep;
      double umax = multcorr::kDefaultRhoUMax;
      double tol = multcorr::kDefaultRhoTol;
      bool json = false;
    };
    auto o = std::make_shared<Opts>();
    auto* opt_u = sub->add_option("--u", o->u_text, "evaluate rho at this u");
    auto* opt_table =
        sub->add_option("--table", o->table_text, "step,umax grid spec");
    sub->add_option("--out", o->out_path, "CSV output path (with --table)");
    sub->add_option("--step", o->step, "grid step (default 1e-3)");
    sub->add_option("--umax", o->umax, "table cutoff (default 40)");
    sub->add_option("--tol", o->tol, "delay-identity residual bound");
    sub->add_flag("--json", o->json, "emit JSON instead of plain values");
    opt_u->excludes(opt_table);
    sub->callback([&, o, opt_u, opt_table] {
      ctx.subcommand = "rho";
      if (opt_u->count() == 0 && opt_table->count() == 0) {
        throw CLI::RequiredError("one of --u or --table");
      }
      runner = [&, o] {
        if (!o->u_text.empty()) {
          const double u = parse_real(o->u_text, "--u");
          const RhoTable table = multcorr::build_rho(
              o->step, std::max(o->umax, std::ceil(u) + 1.0), o->tol);
          bool truncated = false;
          const double value = multcorr::rho_at(table, u, &truncated);
          if (o->json) {
            JsonObject j;
            j.num("u", u).num("rho", value).boolean("truncated", truncated);
            ctx.out << j.done() << "\n";
          } else {
            ctx.out << format_float(value) << "\n";
          }
          return;
        }
        const std::size_t comma = o->table_text.find(',');
        if (comma == std::string::npos) {
          throw std::invalid_argument("--table expects step,umax, got '" +
                                      o->table_text + "'");
        }
        const double step =
            parse_real(o->table_text.substr(0, comma), "table step");
        const double umax =
            parse_real(o->table_text.substr(comma + 1), "table umax");
        if (o->out_path.empty()) {
          throw std::invalid_argument("--table requires --out <path>");
        }
        const RhoTable table = multcorr::build_rho(step, umax, o->tol);
        std::ofstream file(o->out_path);
        if (!file) {
          throw std::invalid_argument("cannot open output file '" +
                                      o->out_path + "'");
        }
        file << "u,rho\n";
        for (std::size_t i = 0; i < table.values.size(); ++i) {
          const double u = static_cast<double>(i) * table.step;
          file << format_float(u) << ',' << format_float(table.values[i])
               << "\n";
        }
        if (o->json) {
          JsonObject j;
          j.num("step", table.step)
              .num("u_max", table.u_max)
              .unsigned_integer("rows", table.values.size())
              .str("out", o->out_path);
          ctx.out << j.done() << "\n";
        } else {
          ctx.out << "wrote " << table.values.size() << " rows to "
                  << o->out_path << "\n";
        }
      };
    });
  }

  // --- integral ----------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "integral", "simplex integrals I_{alpha,m} and the triangle integral");
    sub->require_subcommand(1);
    struct Opts {
      double alpha = 0.0;
      int m = 0;
      std::string method = "auto";
      int nodes = 0;
      int samples = 0;
      std::string seed_text;
      double step = multcorr::kDefaultRhoStep;
      double umax = multcorr::kDefaultRhoUMax;
      bool json = false;
    };
    auto o = std::make_shared<Opts>();

    auto* sub_i = add_sub(sub, "I", "simplex integral I_{alpha,m}");
    sub_i->add_option("--alpha", o->alpha, "threshold exponent in (0,1)")
        ->required();
    sub_i->add_option("--m", o->m, "simplex dimension")->required();
    sub_i->add_option("--method", o->method,
                      "auto|tensor|mc (tensor capped at m <= 3)");
    sub_i->add_option("--nodes", o->nodes, "quadrature nodes per axis");
    sub_i->add_option("--samples", o->samples, "Monte Carlo sample count");
    sub_i->add_option("--seed", o->seed_text, "Monte Carlo seed");
    sub_i->add_option("--step", o->step, "rho table step");
    sub_i->add_option("--umax", o->umax, "rho table cutoff");
    sub_i->add_flag("--json", o->json, "emit JSON");
    sub_i->callback([&, o] {
      ctx.subcommand = "integral I";
      runner = [&, o] {
        multcorr::IntegralRequest req;
        req.alpha = o->alpha;
        req.m = o->m;
        if (o->method == "auto") {
          req.method = o->m <= 3 ? multcorr::IntegralMethod::tensor_quadrature
                                 : multcorr::IntegralMethod::monte_carlo;
        } else if (o->method == "tensor") {
          req.method = multcorr::IntegralMethod::tensor_quadrature;
        } else if (o->method == "mc") {
          req.method = multcorr::IntegralMethod::monte_carlo;
        } else {
          throw std::invalid_argument("unknown method '" + o->method +
                                      "' (expected auto, tensor, or mc)");
        }
        const bool mc = req.method == multcorr::IntegralMethod::monte_carlo;
        req.nodes_or_samples = mc ? o->samples : o->nodes;
        if (!o->seed_text.empty()) {
          req.seed = parse_count(o->seed_text, "--seed");
        }
        if (mc) ctx.seed = req.seed;
        const RhoTable table = multcorr::build_rho(o->step, o->umax);
        const double value = multcorr::integral_I(table, req);
        if (o->json) {
          JsonObject j;
          j.num("alpha", req.alpha).integer("m", req.m);
          j.str("method", mc ? "monte_carlo" : "tensor_quadrature");
          if (mc) {
            j.integer("samples",
                      req.nodes_or_samples > 0 ? req.nodes_or_samples : 400000);
            j.unsigned_integer("seed", req.seed);
          } else {
            j.integer("nodes",
                      req.nodes_or_samples > 0 ? req.nodes_or_samples : 64);
          }
          j.num("value", value);
          ctx.out << j.done() << "\n";
        } else {
          ctx.out << format_float(value) << "\n";
        }
      };
    });

    auto* sub_t =
        add_sub(sub, "T", "triangle integral of the u-density");
    sub_t->add_option("--alpha", o->alpha, "shift exponent in [0,1]")
        ->required();
    sub_t->add_option("--nodes", o->nodes, "quadrature nodes (default 64)");
    sub_t->add_option("--step", o->step, "rho table step");
    sub_t->add_option("--umax", o->umax, "rho table cutoff");
    sub_t->add_flag("--json", o->json, "emit JSON");
    sub_t->callback([&, o] {
      ctx.subcommand = "integral T";
      runner = [&, o] {
        const RhoTable table = multcorr::build_rho(o->step, o->umax);
        const multcorr::TriangleResult r = multcorr::integral_T(
            table, o->alpha, o->nodes > 0 ? o->nodes : 64);
        if (o->json) {
          JsonObject j;
          j.num("alpha", o->alpha)
              .integer("nodes", o->nodes > 0 ? o->nodes : 64)
              .num("value", r.value)
              .num("truncation_bound", r.truncation_bound);
          ctx.out << j.done() << "\n";
        } else {
          ctx.out << format_float(r.value) << "\n";
        }
      };
    });
  }

  // --- correlate ---------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "correlate",
        "logarithmically averaged correlation against the product law");
    struct Opts {
      std::string g1, g2, x_text, omega_text;
      std::int64_t h = 1;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--g1", o->g1, "first function spec")->required();
    sub->add_option("--g2", o->g2, "second function spec")->required();
    sub->add_option("--h", o->h, "nonzero integer shift")->required();
    sub->add_option("--x", o->x_text, "window end (accepts 1e7)")->required();
    sub->add_option("--omega", o->omega_text, "logx|log3x|const:c")
        ->required();
    sub->callback([&, o] {
      ctx.subcommand = "correlate";
      runner = [&, o] {
        const std::uint64_t x = parse_count(o->x_text, "--x");
        const OmegaExpr expr = OmegaExpr::parse(o->omega_text);
        const multcorr::CorrelationRequest req{
            MultFuncSpec::parse(o->g1), MultFuncSpec::parse(o->g2), o->h, x,
            expr.value_at(x)};
        const multcorr::CorrelationReport rep = multcorr::theorem13_check(req);
        ctx.out << correlate_json(req.g1, req.g2, req.h, req.x, expr, rep)
                << "\n";
      };
    });
  }

  // --- charsum -----------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "charsum", "real-character correlations and QNR pair densities");
    sub->require_subcommand(1);
    struct Opts {
      std::string q_text, x_text, omega_text;
      std::int64_t h = 1;
    };
    auto o = std::make_shared<Opts>();

    auto* corr = add_sub(sub, 
        "corr", "logarithmic correlation of chi_Q(n) chi_Q(n+h)");
    corr->add_option("--Q", o->q_text, "odd squarefree modulus > 1")
        ->required();
    corr->add_option("--h", o->h, "nonzero shift")->required();
    corr->add_option("--x", o->x_text, "window end")->required();
    corr->add_option("--omega", o->omega_text, "logx|log3x|const:c")
        ->required();
    corr->callback([&, o] {
      ctx.subcommand = "charsum corr";
      runner = [&, o] {
        const std::uint64_t Q = parse_count(o->q_text, "--Q");
        const std::uint64_t x = parse_count(o->x_text, "--x");
        const OmegaExpr expr = OmegaExpr::parse(o->omega_text);
        const multcorr::BurgessReport rep =
            multcorr::burgess_corr(Q, o->h, x, expr.value_at(x));
        JsonObject j;
        j.unsigned_integer("Q", rep.Q)
            .integer("h", rep.h)
            .unsigned_integer("x", rep.x)
            .str("omega", expr.to_string())
            .num("omega_value", rep.omega)
            .num("value", rep.value)
            .boolean("in_burgess_regime", rep.in_burgess_regime)
            .unsigned_integer("n_terms", rep.n_terms);
        ctx.out << j.done() << "\n";
      };
    });

    auto* qnr = add_sub(sub, 
        "qnr", "density of n with n and n+1 both quadratic nonresidues");
    qnr->add_option("--Q", o->q_text, "odd squarefree modulus > 1")
        ->required();
    qnr->add_option("--x", o->x_text, "window end")->required();
    qnr->callback([&, o] {
      ctx.subcommand = "charsum qnr";
      runner = [&, o] {
        const multcorr::QnrPairReport rep = multcorr::qnr_pair_densities(
            parse_count(o->q_text, "--Q"), parse_count(o->x_text, "--x"));
        JsonObject j;
        j.unsigned_integer("Q", rep.Q)
            .unsigned_integer("x", rep.x)
            .num("log_density", rep.log_density)
            .num("natural_density", rep.natural_density)
            .num("target", rep.target);
        ctx.out << j.done() << "\n";
      };
    });
  }

  // --- experiment --------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "experiment", "named density experiments against analytic targets");
    sub->require_subcommand(1);
    struct Opts {
      std::string name, x_text, params_text, config_path, seed_text;
      std::string sweep_text;
    };
    auto o = std::make_shared<Opts>();

    auto* run = add_sub(sub, "run", "one experiment, JSON output");
    run->add_option("name", o->name, "experiment name")->required();
    run->add_option("--x", o->x_text, "window end (accepts 1e7)");
    run->add_option("--params", o->params_text, "comma-separated k=v pairs");
    run->add_option("--config", o->config_path, "key=value config file");
    run->add_option("--seed", o->seed_text, "Monte Carlo seed for targets");
    run->callback([&, o] {
      ctx.subcommand = "experiment run";
      runner = [&, o] {
        const ExperimentArgs args = assemble_args(
            o->config_path, o->params_text, o->x_text, o->seed_text, ctx);
        run_experiment(o->name, args, ctx.out);
      };
    });

    auto* sweep = add_sub(sub, 
        "sweep", "grid sweep over one parameter, CSV output");
    sweep->add_option("name", o->name, "experiment name")->required();
    sweep->add_option("--param", o->sweep_text, "name=lo:hi:step grid")
        ->required();
    sweep->add_option("--x", o->x_text, "window end");
    sweep->add_option("--params", o->params_text, "fixed k=v pairs");
    sweep->add_option("--config", o->config_path, "key=value config file");
    sweep->add_option("--seed", o->seed_text, "Monte Carlo seed for targets");
    sweep->callback([&, o] {
      ctx.subcommand = "experiment sweep";
      runner = [&, o] {
        ExperimentArgs args = assemble_args(
            o->config_path, o->params_text, o->x_text, o->seed_text, ctx);
        const SweepGrid grid = parse_sweep(o->sweep_text);
        if (!kConfigKeys.contains(grid.param)) {
          throw std::invalid_argument("unknown parameter '" + grid.param +
                                      "'");
        }
        std::optional<RhoTable> table;
        if (experiment_needs_table(o->name)) table = multcorr::build_rho();
        const long long n_steps = static_cast<long long>(
            std::floor((grid.hi - grid.lo) / grid.step + 1e-9));
        ctx.out << "param,estimate,target,abs_error\n";
        for (long long i = 0; i <= n_steps; ++i) {
          const double value = grid.lo + static_cast<double>(i) * grid.step;
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", value);
          args.params[grid.param] = buf;
          const DensityEstimate e =
              primary_estimate(o->name, args, table ? &*table : nullptr);
          ctx.out << format_float(value) << ',' << format_float(e.estimate)
                  << ',' << (e.target ? format_float(*e.target) : "") << ','
                  << (e.abs_error ? format_float(*e.abs_error) : "") << "\n";
        }
      };
    });
  }

  // --- uniformity --------------------------------------------------------
  {
    auto* sub = add_sub(&app, 
        "uniformity",
        "progression-uniformity deficiencies and mean-value stability");
    sub->require_subcommand(1);
    struct Opts {
      std::string g, x_text, q_text, omega_text, shrink_text, a_text;
      int probes = multcorr::kDefaultStrongProbes;
      bool json = false;
    };
    auto o = std::make_shared<Opts>();

    auto* basic = add_sub(sub, 
        "basic", "max over q <= Q of the progression deviation on [x,2x]");
    basic->add_option("--g", o->g, "function spec")->required();
    basic->add_option("--x", o->x_text, "window start")->required();
    basic->add_option("--Q", o->q_text, "modulus bound")->required();
    basic->add_flag("--json", o->json, "emit JSON");
    basic->callback([&, o] {
      ctx.subcommand = "uniformity basic";
      runner = [&, o] {
        const multcorr::UniformityReport rep = multcorr::uniformity_deficiency(
            MultFuncSpec::parse(o->g), parse_count(o->x_text, "--x"),
            parse_count(o->q_text, "--Q"));
        if (o->json) {
          JsonObject j;
          j.str("g", o->g)
              .unsigned_integer("x", rep.x)
              .unsigned_integer("Q", rep.Q)
              .num("eta_star", rep.eta_star)
              .unsigned_integer("worst_q", rep.worst_q)
              .unsigned_integer("worst_a", rep.worst_a);
          ctx.out << j.done() << "\n";
        } else {
          kv(ctx.out, "eta_star", format_float(rep.eta_star));
          kv(ctx.out, "worst_q", std::to_string(rep.worst_q));
          kv(ctx.out, "worst_a", std::to_string(rep.worst_a));
        }
      };
    });

    auto* strong = add_sub(sub, 
        "strong",
        "deviation from the fixed [x,2x] mean across probe windows");
    strong->add_option("--g", o->g, "function spec")->required();
    strong->add_option("--x", o->x_text, "window start")->required();
    strong->add_option("--Q", o->q_text, "modulus bound")->required();
    strong->add_option("--omega", o->omega_text, "logx|log3x|const:c")
        ->required();
    strong->add_option("--probes", o->probes, "probe count (default 8)");
    strong->add_flag("--json", o->json, "emit JSON");
    strong->callback([&, o] {
      ctx.subcommand = "uniformity strong";
      runner = [&, o] {
        const std::uint64_t x = parse_count(o->x_text, "--x");
        const OmegaExpr expr = OmegaExpr::parse(o->omega_text);
        const multcorr::StrongUniformityReport rep =
            multcorr::strong_uniformity_deficiency(
                MultFuncSpec::parse(o->g), x, parse_count(o->q_text, "--Q"),
                expr.value_at(x), o->probes);
        if (o->json) {
          JsonArray probes;
          for (double p : rep.probe_points) probes.push_num(p);
          JsonObject j;
          j.str("g", o->g)
              .unsigned_integer("x", rep.x)
              .unsigned_integer("Q", rep.Q)
              .str("omega", expr.to_string())
              .num("omega_value", rep.omega)
              .num("delta", rep.delta)
              .num("eta_star", rep.eta_star)
              .raw("probe_points", probes.done());
          ctx.out << j.done() << "\n";
        } else {
          kv(ctx.out, "eta_star", format_float(rep.eta_star));
          kv(ctx.out, "delta", format_float(rep.delta));
          kv(ctx.out, "omega", format_float(rep.omega));
          kv(ctx.out, "probes", std::to_string(rep.probe_points.size()));
        }
      };
    });

    auto* stab = add_sub(sub, 
        "stability",
        "progression-mean drift between [x,2x] and the shrunk window");
    stab->add_option("--g", o->g, "function spec")->required();
    stab->add_option("--x", o->x_text, "window start")->required();
    stab->add_option("--shrink", o->shrink_text,
                     "shrink factor: logx|log3x|const:c")
        ->required();
    stab->add_option("--a", o->a_text, "progression residue")->required();
    stab->add_option("--q", o->q_text, "progression modulus")->required();
    stab->add_flag("--json", o->json, "emit JSON");
    stab->callback([&, o] {
      ctx.subcommand = "uniformity stability";
      runner = [&, o] {
        const std::uint64_t x = parse_count(o->x_text, "--x");
        const OmegaExpr expr = OmegaExpr::parse(o->shrink_text);
        const double gap = multcorr::stability_gap(
            MultFuncSpec::parse(o->g), x, expr.value_at(x),
            parse_count(o->a_text, "--a"), parse_count(o->q_text, "--q"));
        if (o->json) {
          JsonObject j;
          j.str("g", o->g)
              .unsigned_integer("x", x)
              .str("shrink", expr.to_string())
              .num("shrink_value", expr.value_at(x))
              .unsigned_integer("a", parse_count(o->a_text, "--a"))
              .unsigned_integer("q", parse_count(o->q_text, "--q"))
              .num("gap", gap);
          ctx.out << j.done() << "\n";
        } else {
          kv(ctx.out, "gap", format_float(gap));
        }
      };
    });
  }

  // --- parse + dispatch --------------------------------------------------
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    const std::vector<std::string> extras = app.remaining(true);
    if (!extras.empty()) {
      static const std::vector<std::string> names = {
          "factor",  "rho",        "integral",  "correlate",
          "charsum", "experiment", "uniformity"};
      const std::string near = multcorr::cli::suggest(extras.front(), names);
      if (!near.empty()) {
        std::cerr << "did you mean '" << near << "'?\n";
      }
    }
    std::cerr << "run '" << (argc > 0 ? argv[0] : "multcorr")
              << " --help' for usage\n";
    return 2;
  }

  if (threads > 0) multcorr::set_thread_count(threads);
  if (!runner) return 0;

  const auto start = std::chrono::steady_clock::now();
  try {
    runner();
  } catch (const multcorr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const multcorr::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  const auto stop = std::chrono::steady_clock::now();
  const double wall =
      std::chrono::duration<double>(stop - start).count();

  const std::string primary = ctx.out.str();
  std::fwrite(primary.data(), 1, primary.size(), stdout);
  std::fflush(stdout);

  JsonArray argv_json;
  for (int i = 1; i < argc; ++i) argv_json.push_str(argv[i]);
  JsonObject manifest;
  manifest.str("subcommand", ctx.subcommand)
      .raw("argv", argv_json.done())
      .str("version", multcorr::kVersion);
  if (ctx.seed) {
    manifest.unsigned_integer("seed", *ctx.seed);
  } else {
    manifest.null_field("seed");
  }
  manifest.integer("threads", multcorr::thread_count())
      .num("wall_time_seconds", wall)
      .unsigned_integer("stdout_bytes", primary.size())
      .str("stdout_checksum",
           "fnv1a64:" + multcorr::cli::hex64(multcorr::cli::fnv1a64(primary)));
  std::cerr << manifest.done() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_main(argc, argv); }
