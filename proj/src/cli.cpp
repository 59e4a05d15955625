#include "uekit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uekit/config.hpp"
#include "uekit/errors.hpp"
#include "uekit/report.hpp"
#include "uekit/text.hpp"

namespace uekit {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<QueryRecord> read_queries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<QueryRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto j = ojson::parse(line);
      QueryRecord q;
      q.id = j.at("id").get<std::string>();
      q.prompt = j.at("prompt").get<std::string>();
      if (j.contains("ground_truths")) q.ground_truths = j["ground_truths"].get<std::vector<std::string>>();
      if (j.contains("dataset_tag")) q.dataset_tag = j["dataset_tag"].get<std::string>();
      if (j.contains("transform_tag") && !j["transform_tag"].is_null()) q.transform_tag = j["transform_tag"].get<std::string>();
      if (q.prompt.empty()) throw ValidationError("prompt must be nonempty", n);
      if (!ids.insert(q.id).second) throw ValidationError("duplicate id \"" + q.id + "\"", n);
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), n);
    }
  }
  return out;
}

std::vector<std::string> score_columns(const std::vector<ScoreRow>& rows) {
  std::set<std::string> s;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.scores) s.insert(k);
  return {s.begin(), s.end()};
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!text::trim(item).empty()) out.push_back(text::trim(item));
  return out;
}

std::vector<std::string> method_ids(const std::string& flag, const Config& cfg, const std::vector<ScoreRow>* rows) {
  if (!flag.empty()) {
    std::vector<std::string> out;
    for (const auto& s : split_ids(flag)) {
      // Known methods are normalised; anything else (e.g. "ensemble") is a raw column.
      try {
        out.push_back(method_id(parse_method(s)));
      } catch (const ValidationError&) {
        out.push_back(s);
      }
    }
    return out;
  }
  if (!cfg.methods.empty()) {
    std::vector<std::string> out;
    for (auto m : cfg.methods) out.push_back(method_id(m));
    return out;
  }
  if (rows) return score_columns(*rows);
  return {};
}

ScoreMatrix matrix(const std::vector<ScoreRow>& rows, const std::vector<std::string>& ids, std::vector<int>& labels) {
  ScoreMatrix m;
  labels.clear();
  for (const auto& r : rows) {
    if (!r.label) continue;
    std::vector<double> v;
    for (const auto& id : ids) {
      auto it = r.scores.find(id);
      if (it == r.scores.end()) throw ValidationError("row " + r.id + " has no score for " + id);
      v.push_back(it->second);
    }
    m.push_back(std::move(v));
    labels.push_back(*r.label);
  }
  return m;
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& out_path, std::ostream& out) {
  if (!out_path.empty())
    save_report(rows, out_path);
  else
    write_report_table(rows, out);
}

std::pair<std::string, std::string> named_path(const std::string& s) {
  auto eq = s.find('=');
  if (eq != std::string::npos) return {s.substr(0, eq), s.substr(eq + 1)};
  return {std::filesystem::path(s).stem().string(), s};
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"uekit: uncertainty scores and evaluation for LLM generations", "uekit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file");

  // generate
  auto* gen = app.add_subcommand("generate", "Build traces (greedy + samples, judge labels) for bare queries");
  std::string gen_in, gen_out;
  int gen_b = -1;
  gen->add_option("--in", gen_in, "Queries JSONL")->required();
  gen->add_option("--out", gen_out, "Dataset JSONL")->required();
  gen->add_option("--samples", gen_b, "Samples per query (default from config)");

  // score
  auto* score = app.add_subcommand("score", "Compute uncertainty scores");
  std::string sc_in, sc_out, sc_methods;
  int sc_par = 0;
  score->add_option("--in", sc_in, "Dataset JSONL")->required();
  score->add_option("--out", sc_out, "Scores JSONL")->required();
  score->add_option("--methods", sc_methods, "Comma-separated method ids");
  score->add_option("--parallelism", sc_par, "Worker threads");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "AUROC / PRR of each score column");
  std::string ev_in, ev_metric = "all", ev_methods, ev_out, ev_curves;
  eval->add_option("--in", ev_in, "Scores JSONL")->required();
  eval->add_option("--metric", ev_metric, "prr, auroc or all")->check(CLI::IsMember({"prr", "auroc", "all"}));
  eval->add_option("--methods", ev_methods, "Comma-separated columns (default: all)");
  eval->add_option("--out", ev_out, "Report file (.csv or .jsonl)");
  eval->add_option("--curve-dir", ev_curves, "Write rejection-curve CSVs here");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Recall thresholds and ARE under distribution shift");
  std::vector<std::string> cal_sets;
  std::string cal_test, cal_methods, cal_out;
  double cal_step = 0.001, cal_target = -1.0;
  std::size_t cal_size = 0;
  cal->add_option("--cal", cal_sets, "Calibration scores, optionally name=path (repeatable)")->required();
  cal->add_option("--test", cal_test, "Test scores JSONL");
  cal->add_option("--methods", cal_methods, "Comma-separated method ids");
  cal->add_option("--step", cal_step, "Recall target spacing");
  cal->add_option("--cal-size", cal_size, "Rows drawn per seed (0 = bootstrap)");
  cal->add_option("--target", cal_target, "Print the threshold for this recall instead");
  cal->add_option("--out", cal_out, "Report file (.csv or .jsonl)");

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "Fit, apply or study score ensembles");
  std::string en_cal, en_test, en_methods, en_out, en_fit, en_save, en_apply, en_in;
  ens->add_option("--cal", en_cal, "Calibration scores JSONL");
  ens->add_option("--test", en_test, "Test scores JSONL (study mode)");
  ens->add_option("--methods", en_methods, "Comma-separated roster");
  ens->add_option("--out", en_out, "Report or scores output");
  ens->add_option("--fit", en_fit, "preprocessor:combiner to fit, e.g. znorm:mean");
  ens->add_option("--save", en_save, "Where to write the fitted model");
  ens->add_option("--apply", en_apply, "Model file to apply to --in");
  ens->add_option("--in", en_in, "Scores JSONL for --apply");

  // longform
  auto* lf = app.add_subcommand("longform", "Claim-level scoring of long answers");
  std::string lf_in, lf_out, lf_labels, lf_report, lf_strategies = "naive,qg,qag";
  lf->add_option("--in", lf_in, "Dataset JSONL (greedy answers are decomposed)")->required();
  lf->add_option("--out", lf_out, "Claims JSONL")->required();
  lf->add_option("--strategies", lf_strategies, "Comma-separated subset of naive,qg,qag");
  lf->add_option("--labels", lf_labels, "Claim labels JSONL {claim,label}");
  lf->add_option("--report", lf_report, "PRR report file");

  // transform
  auto* tr = app.add_subcommand("transform", "Rewrite prompts (context, typo, adversarial)");
  std::string tr_kind, tr_in, tr_out, tr_text;
  int tr_count = 1, tr_pairs = 3;
  std::uint64_t tr_seed = 0;
  tr->add_option("--kind", tr_kind, "context_similar, context_dissimilar, typo or adversarial")->required();
  tr->add_option("--in", tr_in, "Dataset JSONL")->required();
  tr->add_option("--out", tr_out, "Dataset JSONL");
  tr->add_option("--count", tr_count, "Typo edits per prompt (1 or 2)");
  tr->add_option("--pairs", tr_pairs, "Context history pairs");
  tr->add_option("--seed", tr_seed, "Random seed");
  tr->add_option("--text", tr_text, "Adversarial prefix (default: built-in confidence prompt)");

  // search
  auto* se = app.add_subcommand("search", "Search for an adversarial prefix that degrades uncertainty scores");
  std::string se_in, se_out;
  int se_iter = -1;
  se->add_option("--in", se_in, "Training queries JSONL (with ground truths)")->required();
  se->add_option("--out", se_out, "Result JSON");
  se->add_option("--iterations", se_iter, "Tuner rounds (default from config)");

  // report
  auto* rep = app.add_subcommand("report", "Merge and print report files");
  std::vector<std::string> rep_in;
  std::string rep_format = "table", rep_out;
  rep->add_option("--in", rep_in, "Report files")->required();
  rep->add_option("--format", rep_format, "table, csv or jsonl")->check(CLI::IsMember({"table", "csv", "jsonl"}));
  rep->add_option("--out", rep_out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "uekit: " << e.what() << "\n";
    return 2;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    auto prompts = make_prompts(cfg);

    if (*gen) {
      auto backend = make_backend(cfg);
      auto gp = cfg.generation;
      if (gen_b >= 0) gp.B = gen_b;
      save_dataset(generate_dataset(read_queries(gen_in), *backend, prompts, gp), gen_out);
    } else if (*score) {
      auto ds = load_dataset(sc_in);
      std::vector<Method> methods = sc_methods.empty() ? cfg.methods : parse_method_list(sc_methods);
      if (methods.empty()) throw ValidationError("no methods given (--methods or config \"methods\")");
      auto backend = make_backend(cfg);
      TraceScorer scorer(*backend, prompts, cfg.scoring);
      save_scores(score_dataset(ds, methods, scorer, sc_par > 0 ? sc_par : cfg.parallelism), sc_out);
    } else if (*eval) {
      auto rows = load_scores(ev_in);
      std::vector<ReportRow> report;
      for (const auto& id : method_ids(ev_methods, Config{}, &rows)) {
        auto d = column(rows, id);
        if (ev_metric == "prr" || ev_metric == "all") {
          double v = prr(d);
          out << id << " prr " << format_number(v) << "\n";
          report.push_back({id, "-", "prr", v, 0.0, 1});
        }
        if (ev_metric == "auroc" || ev_metric == "all") {
          double v = auroc(d);
          out << id << " auroc " << format_number(v) << "\n";
          report.push_back({id, "-", "auroc", v, 0.0, 1});
        }
        if (!ev_curves.empty()) {
          std::filesystem::create_directories(ev_curves);
          std::ofstream c(std::filesystem::path(ev_curves) / (id + ".csv"), std::ios::binary | std::ios::trunc);
          write_curve_csv(rejection_curve(d), c);
        }
      }
      if (!ev_out.empty()) save_report(report, ev_out);
    } else if (*cal) {
      std::map<std::string, std::vector<ScoreRow>> sets;
      for (const auto& s : cal_sets) {
        auto [name, path] = named_path(s);
        sets[name] = load_scores(path);
      }
      auto ids = method_ids(cal_methods, cfg, &sets.begin()->second);
      if (cal_target >= 0.0) {
        for (const auto& [name, rows] : sets)
          for (const auto& id : ids)
            out << name << " " << id << " threshold " << format_number(threshold_at_recall(column(rows, id), cal_target))
                << "\n";
      } else {
        if (cal_test.empty()) throw ValidationError("calibrate needs --test or --target");
        auto test_rows = load_scores(cal_test);
        std::map<std::string, std::map<std::string, ScoredDataset>> cal_data;
        std::map<std::string, ScoredDataset> test_data;
        for (const auto& id : ids) {
          test_data[id] = column(test_rows, id);
          for (const auto& [name, rows] : sets) cal_data[name][id] = column(rows, id);
        }
        ShiftStudyParams sp;
        sp.seeds = cfg.seeds;
        sp.cal_size = cal_size;
        sp.targets = recall_targets(cal_step);
        emit_report(shift_study(ids, cal_data, test_data, sp), cal_out, out);
      }
    } else if (*ens) {
      if (!en_apply.empty()) {
        if (en_in.empty() || en_out.empty()) throw ValidationError("--apply needs --in and --out");
        auto model = load_ensemble(en_apply);
        auto rows = load_scores(en_in);
        for (auto& r : rows) {
          std::vector<double> v;
          for (const auto& id : model.roster) {
            auto it = r.scores.find(id);
            if (it == r.scores.end()) throw ValidationError("row " + r.id + " has no score for " + id);
            v.push_back(it->second);
          }
          r.scores["ensemble"] = model.predict(v);
        }
        save_scores(rows, en_out);
      } else {
        if (en_cal.empty()) throw ValidationError("ensemble needs --cal (or --apply)");
        auto cal_rows = load_scores(en_cal);
        auto ids = method_ids(en_methods, cfg, &cal_rows);
        std::vector<int> cl;
        auto cm = matrix(cal_rows, ids, cl);
        if (!en_fit.empty()) {
          auto colon = en_fit.find(':');
          if (colon == std::string::npos) throw ValidationError("--fit expects preprocessor:combiner");
          auto model = fit_ensemble(ids, cm, cl, parse_preprocess(en_fit.substr(0, colon)),
                                    parse_combiner(en_fit.substr(colon + 1)), cfg.ensemble);
          if (en_save.empty()) throw ValidationError("--fit needs --save");
          save_ensemble(model, en_save);
        } else {
          if (en_test.empty()) throw ValidationError("ensemble study needs --test");
          auto test_rows = load_scores(en_test);
          std::vector<int> tl;
          auto tm = matrix(test_rows, ids, tl);
          emit_report(to_report(ensemble_study(ids, cm, cl, tm, tl, cfg.ensemble)), en_out, out);
        }
      }
    } else if (*lf) {
      auto ds = load_dataset(lf_in);
      auto backend = make_backend(cfg);
      std::vector<ClaimStrategy> strategies;
      for (const auto& s : split_ids(lf_strategies)) strategies.push_back(parse_claim_strategy(s));
      std::optional<ClaimLabeler> labeler;
      if (!lf_labels.empty()) labeler = file_labeler(lf_labels);
      std::vector<ClaimRecord> claims;
      std::ofstream o(lf_out, std::ios::binary | std::ios::trunc);
      if (!o) throw Error("cannot write " + lf_out);
      for (const auto& t : ds.entries)
        for (const auto& c : decompose(t.greedy.text, *backend, prompts))
          for (auto s : strategies) {
            auto rec = score_claim(t.query, c, s, lns_claim_scorer(), *backend, prompts, cfg.longform);
            if (labeler) rec.label = (*labeler)(rec);
            o << claim_to_json(rec) << '\n';
            claims.push_back(std::move(rec));
          }
      if (labeler) emit_report(to_report(evaluate_claims(claims)), lf_report, out);
    } else if (*tr) {
      auto ds = load_dataset(tr_in);
      TransformSpec spec;
      spec.kind = parse_transform(tr_kind);
      spec.typo_count = tr_count;
      spec.history_pairs = tr_pairs;
      spec.seed = tr_seed;
      if (tr->count("--text")) spec.adversarial_text = tr_text;
      auto res = apply_transform(ds, spec);
      if (tr_out.empty())
        write_dataset(res, out);
      else
        save_dataset(res, tr_out);
    } else if (*se) {
      auto queries = read_queries(se_in);
      auto backend = make_backend(cfg);
      std::vector<Method> probes;
      for (const auto& p : cfg.probe_methods) probes.push_back(parse_method(p));
      TraceScorer scorer(*backend, prompts, cfg.scoring);
      auto gp = cfg.generation;
      gp.label = false;
      CandidateEvaluator evaluator = [&](const std::string& prefix) {
        std::vector<QueryRecord> qs;
        for (const auto& q : queries) qs.push_back(prefix.empty() ? q : apply_adversarial(q, prefix));
        auto ds = generate_dataset(qs, *backend, prompts, gp);
        std::size_t correct = 0;
        for (auto& t : ds.entries) {
          const auto& ans = cfg.search_greedy_accuracy || t.samples.empty() ? t.greedy.text : t.samples.front().text;
          t.label = judge_correctness(*backend, prompts, t.query, ans);
          correct += *t.label == 0;
        }
        auto rows = score_dataset(ds, probes, scorer, cfg.parallelism);
        CandidateResult res;
        res.accuracy = ds.size() ? static_cast<double>(correct) / static_cast<double>(ds.size()) : 0.0;
        for (auto m : probes) {
          try {
            res.prr.push_back(prr(column(rows, method_id(m))));
          } catch (const MetricError&) {
            res.prr.push_back(0.0);
          }
        }
        return res;
      };
      auto sp = cfg.search;
      if (se_iter >= 0) sp.iterations = se_iter;
      auto result = adversarial_search(evaluator, *backend, prompts, cfg.probe_methods, sp);
      ojson j;
      j["best_prompt"] = result.best_prompt;
      j["best_mean_prr"] = result.best.mean_prr();
      j["best_accuracy"] = result.best.accuracy;
      ojson hist = ojson::array();
      for (const auto& h : result.history)
        hist.push_back({{"prompt", h.prompt}, {"prr", h.result.prr}, {"accuracy", h.result.accuracy}, {"admissible", h.admissible}});
      j["history"] = std::move(hist);
      if (se_out.empty()) {
        out << j.dump(2) << "\n";
      } else {
        std::ofstream o(se_out, std::ios::binary | std::ios::trunc);
        o << j.dump(2) << "\n";
      }
    } else if (*rep) {
      std::vector<ReportRow> rows;
      for (const auto& p : rep_in) {
        auto r = load_report(p);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      std::ofstream file;
      if (!rep_out.empty()) {
        file.open(rep_out, std::ios::binary | std::ios::trunc);
        if (!file) throw Error("cannot write " + rep_out);
      }
      std::ostream& o = rep_out.empty() ? out : file;
      if (rep_format == "csv")
        write_report_csv(rows, o);
      else if (rep_format == "jsonl")
        write_report_jsonl(rows, o);
      else
        write_report_table(rows, o);
    }
  } catch (const std::exception& e) {
    err << "uekit: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace uekit
