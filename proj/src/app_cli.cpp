// Copyright 2026 The achgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "achgraph/app/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "achgraph/app/http.hpp"
#include "achgraph/app/service.hpp"
#include "achgraph/attainment.hpp"
#include "achgraph/cf.hpp"
#include "achgraph/datagen.hpp"
#include "achgraph/stats.hpp"

namespace achgraph::app {

namespace {

constexpr stats::LomaxParams kReferenceLomax{4.78, 0.61};

struct Options {
  std::string data;
  std::uint64_t seed = 0;

  // gen
  double scale = 1.0;
  std::string config_file;
  std::string report_file;

  // rate, eval-cf
  std::string out_file;

  // query
  std::string query_file;
  std::string query_text;
  std::int64_t limit = 100;
  bool header = false;

  // train, eval-cf, eval-pr
  std::string model_file;
  cf::TrainParams train;
  std::string schedule = "per-rating";
  bool planted = false;
  std::size_t folds = 5;
  std::size_t top_n = 5;

  // hist
  std::size_t bins = 50;
  std::string plot_file;

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors = "*";
};

std::ofstream open_out(const std::string& file) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw DataError("cannot write " + file);
  return f;
}

std::string read_text(const std::string& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw DataError("cannot read " + file);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Service load_service(const Options& o) {
  AppConfig c;
  c.data = o.data;
  c.default_limit = o.limit;
  c.check();
  return Service::load(c.data, c.default_limit);
}

cf::TrainParams train_params(const Options& o) {
  auto p = o.train;
  p.seed = o.seed;
  p.schedule = o.schedule == "per-user" ? cf::Schedule::PerUser : cf::Schedule::PerRating;
  return p;
}

cf::RatingsTable ratings(const Options& o) {
  if (o.planted) return datagen::planted_ratings({}).table;
  if (o.data.empty()) throw UsageError("--data or --planted is required");
  return cf::ratings_from_graph(load_service(o).graph());
}

void add_training(CLI::App* sub, Options& o) {
  sub->add_option("--factors", o.train.factors, "Latent factors")->capture_default_str();
  sub->add_option("--epochs", o.train.epochs, "SGD epochs")->capture_default_str();
  sub->add_option("--lr", o.train.learning_rate, "Learning rate")->capture_default_str();
  sub->add_option("--reg", o.train.regularization, "Regularization")->capture_default_str();
  sub->add_option("--init-std", o.train.init_std, "Initial factor standard deviation")->capture_default_str();
  sub->add_option("--schedule", o.schedule, "Update schedule")
      ->check(CLI::IsMember({"per-rating", "per-user"}))
      ->capture_default_str();
}

int run_gen(const Options& o, const CLI::App& sub, std::ostream& out) {
  datagen::GenConfig c;
  if (!o.config_file.empty()) c = datagen::load_config(o.config_file, c);
  if (sub.count("--scale")) c.scale = o.scale;
  if (sub.count("--seed")) c.seed = o.seed;
  const auto report = datagen::generate(c, o.data);
  datagen::write_report(out, report);
  if (!o.report_file.empty()) {
    auto f = open_out(o.report_file);
    datagen::write_report(f, report);
  }
  return 0;
}

int run_rate(const Options& o, std::ostream& out) {
  const auto svc = load_service(o);
  const auto& g = svc.graph();
  out << "appid\tname\towners\tmin\tmax\tmean\n";
  for (const auto& s : rating_summaries(g)) {
    const auto& v = g.vertex(s.game);
    out << render(v.attrs.at("appid")) << '\t' << render(v.attrs.at("name")) << '\t' << s.owners << '\t'
        << format_real(s.min) << '\t' << format_real(s.max) << '\t' << format_real(s.mean) << '\n';
  }
  if (!o.out_file.empty()) {
    auto f = open_out(o.out_file);
    f << "steamid\tappid\tattainmentRating\n";
    for (const auto& e : g.edges()) {
      if (e.kind != EdgeKind::Owns) continue;
      f << render(g.vertex(e.src).attrs.at("steamid")) << '\t' << render(g.vertex(e.dst).attrs.at("appid")) << '\t'
        << render(e.attrs.at(std::string(kAttainmentAttr))) << '\n';
    }
  }
  return 0;
}

int run_query(const Options& o, std::ostream& out) {
  if (o.query_file.empty() == o.query_text.empty()) throw UsageError("give exactly one of --file and --text");
  const auto svc = load_service(o);
  const auto text = o.query_file.empty() ? o.query_text : read_text(o.query_file);
  out << to_tsv(svc.run_query(text), o.header);
  return 0;
}

int run_train(const Options& o, std::ostream& out) {
  const auto table = ratings(o);
  const auto model = cf::train(table, train_params(o));
  cf::save_model(model, o.model_file);
  out << "ratings\t" << table.size() << "\nusers\t" << table.n_users() << "\nitems\t" << table.n_items()
      << "\ntrain_mse\t" << format_real(cf::training_mse(model, table.triples())) << '\n';
  return 0;
}

int run_eval_cf(const Options& o, std::ostream& out) {
  const auto folds = cf::cross_validate(ratings(o), train_params(o), o.folds);
  stats::write_folds_tsv(out, folds);
  if (!o.out_file.empty()) {
    auto f = open_out(o.out_file);
    stats::write_folds_tsv(f, folds);
  }
  return 0;
}

int run_eval_pr(const Options& o, std::ostream& out) {
  const auto table = ratings(o);
  const auto& all = table.triples();
  const auto fold = cf::fold_assignment(all.size(), o.folds, o.seed);
  std::vector<cf::Triple> train_set, test_set;
  for (std::size_t i = 0; i < all.size(); ++i) (fold[i] == 0 ? test_set : train_set).push_back(all[i]);
  const auto model = cf::train(train_set, table.n_users(), table.n_items(), train_params(o));
  const auto thresholds = stats::default_thresholds();
  stats::write_pr_tsv(out, stats::precision_recall_at_n(model, test_set, o.top_n, thresholds));
  return 0;
}

int run_fit_lomax(const Options& o, std::ostream& out) {
  const auto svc = load_service(o);
  const auto sample = stats::attainment_sample(svc.graph());
  const auto fit = stats::lomax_fit(sample);
  out << "n\t" << sample.size() << "\nshape\t" << format_real(fit.shape) << "\nscale\t" << format_real(fit.scale)
      << "\nks_fit\t" << format_real(stats::ks_statistic(sample, fit)) << "\nks_reference\t"
      << format_real(stats::ks_statistic(sample, kReferenceLomax)) << '\n';
  return 0;
}

int run_hist(const Options& o, std::ostream& out) {
  const auto svc = load_service(o);
  if (o.bins == 0) throw UsageError("--bins must be positive");
  const auto hists = svc.attainment_histograms(o.bins);
  stats::write_histograms_tsv(out, hists);
  if (!o.plot_file.empty()) {
    auto f = open_out(o.plot_file);
    stats::write_plot_data(f, hists);
  }
  return 0;
}

int run_serve(const Options& o, std::ostream& out) {
  AppConfig c;
  c.data = o.data;
  c.host = o.host;
  c.port = o.port;
  c.default_limit = o.limit;
  c.seed = o.seed;
  c.cors_origin = o.cors;
  c.check();
  HttpServer server(c);
  server.load_async();
  const int port = server.bind();
  out << "listening on http://" << c.host << ':' << port << std::endl;
  server.run();
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attainment-rated game graph toolkit", "achgraph"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool data_required) {
    auto* d = sub->add_option("--data", o.data, "Dataset directory");
    if (data_required) d->required();
    sub->add_option("--seed", o.seed, "Random seed");
    return sub;
  };

  auto* gen = common(app.add_subcommand("gen", "Generate a synthetic dataset"), false);
  gen->get_option("--data")->description("Output dataset directory");
  gen->add_option("--scale", o.scale, "Size relative to the reference dataset")->capture_default_str();
  gen->add_option("--config", o.config_file, "JSON config overrides")->check(CLI::ExistingFile);
  gen->add_option("--report", o.report_file, "Also write the calibration report here");
  // --out names the same directory as --data.
  gen->add_option("--out", o.data, "Output dataset directory")->excludes(gen->get_option("--data"));

  auto* rate = common(app.add_subcommand("rate", "Annotate ratings and summarize them per game"), true);
  rate->add_option("--out", o.out_file, "Write per-ownership ratings as TSV");

  auto* query = common(app.add_subcommand("query", "Run a query and print tab-separated rows"), true);
  query->add_option("--file", o.query_file, "Query file")->check(CLI::ExistingFile);
  query->add_option("--text", o.query_text, "Query text");
  query->add_option("--limit", o.limit, "LIMIT for queries without one")->capture_default_str();
  query->add_flag("--header", o.header, "Print column names first");

  auto* train = common(app.add_subcommand("train", "Train an SVD++ model and save it"), false);
  train->add_option("--model", o.model_file, "Model output file")->required();
  train->add_flag("--planted", o.planted, "Use the planted low-rank ratings");
  add_training(train, o);

  auto* eval_cf = common(app.add_subcommand("eval-cf", "k-fold cross-validation of SVD++"), false);
  eval_cf->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
  eval_cf->add_option("--out", o.out_file, "Also write the fold table here");
  eval_cf->add_flag("--planted", o.planted, "Use the planted low-rank ratings");
  add_training(eval_cf, o);

  auto* eval_pr = common(app.add_subcommand("eval-pr", "Precision and recall at n on a held-out fold"), false);
  eval_pr->add_option("--n", o.top_n, "Recommendations per user")->capture_default_str();
  eval_pr->add_option("--folds", o.folds, "Hold out one of this many folds")->capture_default_str();
  eval_pr->add_flag("--planted", o.planted, "Use the planted low-rank ratings");
  add_training(eval_pr, o);

  auto* fit = common(app.add_subcommand("fit-lomax", "Fit a Lomax distribution to the ratings"), true);

  auto* hist = common(app.add_subcommand("hist", "Per-genre rating histograms"), true);
  hist->add_option("--bins", o.bins, "Bins over [0,1]")->capture_default_str();
  hist->add_option("--plot-data", o.plot_file, "Write JSON-lines plot data here");

  auto* serve = common(app.add_subcommand("serve", "Serve the HTTP API"), true);
  serve->add_option("--host", o.host, "Listen address")->capture_default_str();
  serve->add_option("--port", o.port, "Listen port")->capture_default_str();
  serve->add_option("--cors", o.cors, "Access-Control-Allow-Origin value")->capture_default_str();
  serve->add_option("--limit", o.limit, "LIMIT for queries without one")->capture_default_str();

  if (argc <= 1) {
    err << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success) ? 0 : 1;
  }

  try {
    if (*gen) {
      if (o.data.empty()) throw UsageError("gen needs --data or --out");
      return run_gen(o, *gen, out);
    }
    if (*rate) return run_rate(o, out);
    if (*query) return run_query(o, out);
    if (*train) return run_train(o, out);
    if (*eval_cf) return run_eval_cf(o, out);
    if (*eval_pr) return run_eval_pr(o, out);
    if (*fit) return run_fit_lomax(o, out);
    if (*hist) return run_hist(o, out);
    if (*serve) return run_serve(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const QueryFailure& e) {
    err << "query error";
    if (e.line()) err << " at " << *e.line() << ':' << *e.column();
    err << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace achgraph::app
