#include "genreflow/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "genreflow/checkpoint.hpp"
#include "genreflow/corpus.hpp"
#include "genreflow/csv.hpp"
#include "genreflow/manifest.hpp"
#include "genreflow/metrics.hpp"
#include "genreflow/models.hpp"
#include "genreflow/plugin.hpp"
#include "genreflow/reports.hpp"
#include "genreflow/textprep.hpp"
#include "genreflow/tfidf.hpp"

namespace genreflow::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVocabFile = "vocab.tsv";
constexpr const char* kTfidfFile = "tfidf.tsv";
constexpr const char* kCheckpointFile = "model.ckpt";

std::string num(double v, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed to write '" + path.string() + "'");
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return f;
}

std::string csv_line(const csv::Row& row) {
  std::ostringstream s;
  csv::write_row(s, row);
  return s.str();
}

// key=value sidecar describing how a corpus file was produced.
fs::path meta_path(const fs::path& corpus) { return fs::path(corpus.string() + ".meta"); }

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

// ---------------------------------------------------------------- pipeline

struct PipelineFlags {
  std::string speech_plugin;
  std::string situation_plugin;
  std::string modalities = "S,D,M";
  std::string fusion_order = "D,S,M";
  std::int64_t frame_stride = kDefaultFrameStride;
  double silence_db = SilenceOptions{}.threshold_db;
  std::int64_t min_silence_ms = SilenceOptions{}.min_silence_ms;
  std::int64_t min_chunk_ms = SilenceOptions{}.min_chunk_ms;
  std::size_t workers = 1;
  bool verb_definitions = false;
  std::string media_root;
  std::string work_dir;
};

void add_pipeline_flags(CLI::App* sub, PipelineFlags& f) {
  sub->add_option("--speech-plugin", f.speech_plugin, "Speech recognizer executable")->check(CLI::ExistingFile);
  sub->add_option("--situation-plugin", f.situation_plugin, "Situation recognizer executable")
      ->check(CLI::ExistingFile);
  sub->add_option("--modalities", f.modalities, "Subset of S,D,M feeding the corpus")->capture_default_str();
  sub->add_option("--fusion-order", f.fusion_order, "Concatenation order of D,S,M")->capture_default_str();
  sub->add_option("--frame-stride", f.frame_stride, "Sample every n-th frame")->capture_default_str();
  sub->add_option("--silence-db", f.silence_db, "Silence threshold in dBFS")->capture_default_str();
  sub->add_option("--min-silence-ms", f.min_silence_ms, "Shortest silence that splits audio")->capture_default_str();
  sub->add_option("--min-chunk-ms", f.min_chunk_ms, "Shortest audio chunk kept")->capture_default_str();
  sub->add_option("--workers", f.workers, "Trailers processed concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--verb-definitions", f.verb_definitions, "Append verb definitions to situation text");
  sub->add_option("--media-root", f.media_root, "Base for relative media paths (default: manifest directory)");
  sub->add_option("--work-dir", f.work_dir, "Directory for plugin exchange files");
}

struct Pipeline {
  PipelineOptions options;
  std::unique_ptr<SpeechRecognizer> speech;
  std::unique_ptr<SituationRecognizer> situation;
  Recognizers recognizers() const { return {speech.get(), situation.get()}; }
};

Pipeline make_pipeline(const PipelineFlags& f, const fs::path& manifest, const fs::path& default_work_dir) {
  Pipeline p;
  p.options.modalities = ModalityMask::parse(f.modalities);
  p.options.order = parse_fusion_order(f.fusion_order);
  p.options.frame_stride = f.frame_stride;
  p.options.silence = SilenceOptions{f.silence_db, f.min_silence_ms, f.min_chunk_ms};
  p.options.workers = f.workers;
  p.options.verb_definitions = f.verb_definitions;
  p.options.media_root = f.media_root.empty() ? fs::absolute(manifest).parent_path() : fs::path(f.media_root);
  if (f.frame_stride < 1) throw Error(ErrorCode::InvalidStride, "--frame-stride must be >= 1");

  const fs::path work = f.work_dir.empty() ? default_work_dir : fs::path(f.work_dir);
  const auto timeout = plugin_timeout_from_env();
  if (p.options.modalities.situation) {
    if (f.situation_plugin.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--situation-plugin is required when modality S is enabled");
    }
    fs::create_directories(work);
    p.situation = std::make_unique<SubprocessSituationRecognizer>(
        SubprocessOptions{fs::absolute(f.situation_plugin), work, timeout});
  }
  if (p.options.modalities.dialogue) {
    if (f.speech_plugin.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--speech-plugin is required when modality D is enabled");
    }
    fs::create_directories(work);
    p.speech =
        std::make_unique<SubprocessSpeechRecognizer>(SubprocessOptions{fs::absolute(f.speech_plugin), work, timeout});
  }
  return p;
}

// ---------------------------------------------------------------- features

struct FeatureModel {
  ModelKind kind = ModelKind::ECnet;
  std::optional<Vocabulary> vocab;
  std::optional<TfidfModel> tfidf;
  std::size_t max_len = 0;

  std::string hash() const { return vocab ? vocab->hash() : tfidf->hash(); }

  nn::Tensor2 encode(const std::string& text) const {
    const auto tokens = tokenize(text);
    if (vocab) return to_input(encode_sequence(tokens, *vocab, max_len));
    return to_input(tfidf->transform(tokens));
  }
};

FeatureModel load_features(const TrainedModel& model, const std::string& features_flag, const fs::path& checkpoint) {
  FeatureModel f;
  f.kind = model.config.kind;
  f.max_len = model.config.max_len;
  const bool ecnet = f.kind == ModelKind::ECnet;
  const fs::path path =
      features_flag.empty() ? checkpoint.parent_path() / (ecnet ? kVocabFile : kTfidfFile) : fs::path(features_flag);
  auto in = open_input(path);
  if (ecnet) {
    f.vocab = Vocabulary::load(in);
  } else {
    f.tfidf = TfidfModel::load(in);
  }
  return f;
}

// ---------------------------------------------------------------- scoring

struct ScoreInputs {
  std::string checkpoint;
  std::string features;
  std::string corpus;
  std::string split;
  std::string scores;
};

void add_score_inputs(CLI::App* sub, ScoreInputs& in) {
  auto* ckpt = sub->add_option("--checkpoint", in.checkpoint, "Trained checkpoint")->check(CLI::ExistingFile);
  sub->add_option("--features", in.features, "Vocabulary or TF-IDF file (default: next to the checkpoint)")
      ->check(CLI::ExistingFile);
  auto* corpus = sub->add_option("--corpus", in.corpus, "Corpus file to score")->check(CLI::ExistingFile);
  sub->add_option("--split", in.split, "split.tsv from training; only eval rows are scored")
      ->check(CLI::ExistingFile);
  auto* scores = sub->add_option("--scores", in.scores, "Precomputed scores CSV instead of a checkpoint")
      ->check(CLI::ExistingFile);
  scores->excludes(ckpt);
  ckpt->needs(corpus);
}

std::set<std::string> eval_ids(const fs::path& split_path) {
  auto in = open_input(split_path);
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::MalformedFile, "split line without a tab: " + line);
    const auto role = line.substr(tab + 1);
    if (role == "eval") ids.insert(line.substr(0, tab));
    else if (role != "train") throw Error(ErrorCode::MalformedFile, "split role must be train or eval: " + line);
  }
  return ids;
}

std::vector<ScoredPrediction> read_scores(const fs::path& path) {
  auto in = open_input(path);
  const auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "scores file is empty");
  const auto& header = rows.front();
  if (header.size() != kGenreCount + 2 || header.front() != "trailer_id" || header.back() != "truth") {
    throw Error(ErrorCode::MalformedFile, "scores header must be trailer_id,<5 genres>,truth");
  }
  std::vector<ScoredPrediction> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedFile, "scores row " + std::to_string(r + 1) + " has wrong field count");
    }
    ScoredPrediction p;
    p.trailer_id = row[0];
    for (std::size_t g = 0; g < kGenreCount; ++g) {
      try {
        std::size_t used = 0;
        p.scores[g] = std::stod(row[g + 1], &used);
        if (used != row[g + 1].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedFile, "scores row " + std::to_string(r + 1) + ": bad score '" + row[g + 1] + "'");
      }
    }
    p.truth = LabelVector::from_bits(row.back());
    out.push_back(std::move(p));
  }
  return out;
}

std::string scores_csv(const std::vector<ScoredPrediction>& preds) {
  csv::Row header{"trailer_id"};
  for (auto g : kAllGenres) header.emplace_back(genre_name(g));
  header.emplace_back("truth");
  std::string out = csv_line(header);
  for (const auto& p : preds) {
    csv::Row row{p.trailer_id};
    for (double s : p.scores) row.push_back(num(s, 17));
    row.push_back(p.truth.to_bits());
    out += csv_line(row);
  }
  return out;
}

struct Scored {
  std::vector<ScoredPrediction> preds;
  std::string model_name = "scores";
  std::optional<std::string> corpus;
};

Scored score(const ScoreInputs& in) {
  Scored result;
  if (!in.scores.empty()) {
    result.preds = read_scores(in.scores);
  } else {
    if (in.checkpoint.empty()) throw Error(ErrorCode::InvalidConfig, "give --checkpoint and --corpus, or --scores");
    const auto model = load_checkpoint(fs::path(in.checkpoint));
    const auto features = load_features(model, in.features, in.checkpoint);
    const auto hash = features.hash();
    auto corpus_in = open_input(in.corpus);
    auto entries = read_corpus(corpus_in);
    if (!in.split.empty()) {
      const auto ids = eval_ids(in.split);
      std::erase_if(entries, [&](const CorpusEntry& e) { return !ids.contains(e.trailer_id); });
    }
    for (const auto& e : entries) {
      result.preds.push_back({e.trailer_id, predict(model, features.encode(e.text), hash), e.labels});
    }
    result.model_name = model.config.kind == ModelKind::ECnet ? "ECnet" : "TFAnet";
    result.corpus = in.corpus;
  }
  if (result.preds.empty()) throw Error(ErrorCode::EmptyInput, "nothing to score");
  return result;
}

std::optional<PrCurve> try_micro(const std::vector<ScoredPrediction>& preds) {
  try {
    return micro_pr_curve(preds);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPositives) throw;
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- summary

std::string shape_text(const nn::Shape& s) {
  std::string out = "(None";
  for (auto d : s.dims) out += ", " + std::to_string(d);
  return out + ")";
}

std::string network_summary(const nn::Network& net) {
  std::vector<std::array<std::string, 3>> rows{{"Layer (type)", "Output Shape", "Param #"}};
  for (const auto& l : net.summary()) {
    rows.push_back({l.name + " (" + l.type + ")", shape_text(l.output), std::to_string(l.parameters)});
  }
  std::array<std::size_t, 3> w{};
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 3; ++c) w[c] = std::max(w[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    out += r[0] + std::string(w[0] - r[0].size() + 2, ' ') + r[1] + std::string(w[1] - r[1].size() + 2, ' ') +
           std::string(w[2] - r[2].size(), ' ') + r[2] + "\n";
  }
  out += "Total params: " + std::to_string(net.parameter_count()) + "\n";
  return out;
}

// ---------------------------------------------------------------- commands

struct IngestFlags {
  std::string manifest;
  std::string out;
  double eval_fraction = 0.15;
  std::uint64_t seed = 1;
  bool stratify = false;
};

int cmd_ingest(const IngestFlags& f, std::ostream& out) {
  const auto records = load_manifest(f.manifest);
  const auto split = split_dataset(records, f.eval_fraction, f.seed, f.stratify);
  std::set<std::string> eval;
  for (const auto& r : split.eval) eval.insert(r.id);

  std::ostringstream manifest;
  write_manifest(manifest, records);
  std::string split_text = "# seed=" + std::to_string(f.seed) + " eval_fraction=" + num(f.eval_fraction) + "\n";
  for (const auto& r : records) split_text += r.id + "\t" + (eval.contains(r.id) ? "eval" : "train") + "\n";

  const fs::path dir(f.out);
  write_text(dir / "manifest.csv", manifest.str());
  write_text(dir / "split.tsv", split_text);
  out << records.size() << " trailers: " << split.train.size() << " train, " << split.eval.size() << " eval\n";
  return kExitOk;
}

struct BuildFlags {
  std::string manifest;
  std::string out;
  std::string report;
  bool skip_failures = false;
  PipelineFlags pipeline;
};

int cmd_build_corpus(const BuildFlags& f, std::ostream& out, std::ostream& err) {
  const fs::path out_path(f.out);
  auto pipeline = make_pipeline(f.pipeline, f.manifest, fs::path(f.out + ".exchange"));
  const auto records = load_manifest(f.manifest);
  const auto outcomes = build_corpora(records, pipeline.recognizers(), pipeline.options);

  std::string report = "trailer_id\tstatus\tsituation\tdialogue\tmetadata\terror\n";
  std::vector<CorpusEntry> entries;
  std::optional<Error> first_failure;
  std::size_t failures = 0;
  auto flag = [](const std::string& s) { return s.empty() ? "0" : "1"; };
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.corpus) {
      report += o.trailer_id + "\tok\t" + flag(o.corpus->c_s) + "\t" + flag(o.corpus->c_d) + "\t" +
                flag(o.corpus->c_m) + "\t\n";
      entries.push_back({o.trailer_id, records[i].labels(), o.corpus->c_sd});
    } else {
      std::string msg = o.error->what();
      std::replace_if(msg.begin(), msg.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
      report += o.trailer_id + "\tfailed\t\t\t\t" + msg + "\n";
      err << "error: " << o.error->what() << "\n";
      if (!first_failure) first_failure = *o.error;
      ++failures;
    }
  }
  write_text(f.report.empty() ? fs::path(f.out + ".report.tsv") : fs::path(f.report), report);

  if (failures > 0 && !f.skip_failures) {
    err << failures << " of " << records.size() << " trailers failed; corpus not written (use --skip-failures)\n";
    return exit_code_for(first_failure->code());
  }
  if (entries.empty()) throw Error(ErrorCode::EmptyCorpus, "no trailer produced a corpus");
  if (std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.text.empty(); })) {
    throw Error(ErrorCode::AllEmptyCorpus, "every fused corpus is empty");
  }

  std::ostringstream corpus;
  write_corpus(corpus, std::span<const CorpusEntry>(entries));
  write_text(out_path, corpus.str());
  const auto& o = pipeline.options;
  write_text(meta_path(out_path), "modalities=" + o.modalities.to_string() + "\nfusion_order=" +
                                      fusion_order_to_string(o.order) + "\nframe_stride=" +
                                      std::to_string(o.frame_stride) + "\nsilence_db=" + num(o.silence.threshold_db) +
                                      "\nmin_silence_ms=" + std::to_string(o.silence.min_silence_ms) +
                                      "\nmin_chunk_ms=" + std::to_string(o.silence.min_chunk_ms) +
                                      "\nverb_definitions=" + (o.verb_definitions ? "1" : "0") + "\n");
  out << entries.size() << " trailers written to " << f.out;
  if (failures > 0) out << " (" << failures << " skipped)";
  out << "\n";
  return kExitOk;
}

struct TrainFlags {
  std::string corpus;
  std::string model = "ecnet";
  std::string out;
  std::size_t epochs = 50;
  double lr = 0.001;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  double eval_fraction = 0.15;
  std::size_t min_df = 2;
  std::size_t max_len = 0;
  std::size_t max_features = kDefaultTfidfMaxFeatures;
  bool stratify = false;
  bool quiet = false;
};

int cmd_train(const TrainFlags& f, std::ostream& out) {
  const auto kind = parse_model_kind(f.model);
  if (!kind) throw Error(ErrorCode::InvalidConfig, "--model must be ecnet or tfanet");
  if (f.epochs == 0) throw Error(ErrorCode::InvalidConfig, "--epochs must be >= 1");

  auto corpus_in = open_input(f.corpus);
  const auto entries = read_corpus(corpus_in);
  if (entries.size() < 2) throw Error(ErrorCode::EmptyInput, "training needs at least 2 corpus entries");

  std::vector<std::string> strata;
  if (f.stratify) {
    for (const auto& e : entries) strata.push_back(e.labels.to_bits());
  }
  const auto split = split_indices(entries.size(), f.eval_fraction, f.seed, strata);

  std::vector<TokenList> tokens;
  tokens.reserve(entries.size());
  for (const auto& e : entries) tokens.push_back(tokenize(e.text));
  std::vector<TokenList> train_tokens;
  for (auto i : split.train) train_tokens.push_back(tokens[i]);

  const fs::path dir(f.out);
  FeatureModel features;
  ModelConfig config;
  if (*kind == ModelKind::ECnet) {
    auto vocab = build_vocabulary(train_tokens, f.min_df);
    if (vocab.size() == 0) throw Error(ErrorCode::InvalidConfig, "vocabulary is empty; lower --min-df");
    std::size_t max_len = f.max_len;
    if (max_len == 0) {
      for (const auto& t : train_tokens) {
        max_len = std::max<std::size_t>(max_len, std::count_if(t.begin(), t.end(), [&](const auto& tok) {
                                          return vocab.index_of(tok).has_value();
                                        }));
      }
      max_len = std::max<std::size_t>(max_len, ModelConfig{}.pool);
    }
    config = ModelConfig::ecnet(vocab.size(), max_len);
    features.vocab = std::move(vocab);
    features.max_len = max_len;
  } else {
    auto tfidf = fit_tfidf(train_tokens, f.min_df, f.max_features);
    if (tfidf.size() == 0) throw Error(ErrorCode::InvalidConfig, "no n-gram survives --min-df");
    config = ModelConfig::tfanet(tfidf.size());
    features.tfidf = std::move(tfidf);
  }
  features.kind = *kind;
  config.epochs = f.epochs;
  config.learning_rate = f.lr;
  config.batch_size = f.batch_size;
  config.seed = f.seed;
  config.validate();

  auto make_samples = [&](const std::vector<std::size_t>& idx) {
    std::vector<Sample> s;
    for (auto i : idx) s.push_back({entries[i].trailer_id, features.encode(entries[i].text), entries[i].labels});
    return s;
  };
  const auto train_set = make_samples(split.train);
  const auto eval_set = make_samples(split.eval);

  auto network = build_network(config);
  const auto summary = network_summary(network);
  if (!f.quiet) out << summary;

  auto trained = train(std::move(network), train_set, eval_set, config, features.hash(), [&](const EpochRecord& r) {
    if (f.quiet) return;
    out << "epoch " << r.epoch << "/" << config.epochs << "  loss " << num(r.train_loss, 6) << "  subset_acc "
        << num(r.train_subset_accuracy, 4);
    if (r.eval_loss) out << "  eval_loss " << num(*r.eval_loss, 6);
    out << "\n";
  });

  std::string history = "# seed=" + std::to_string(f.seed) + " model=" + std::string(model_kind_name(*kind)) +
                        " lr=" + num(f.lr) + " batch_size=" + std::to_string(f.batch_size) +
                        " epochs=" + std::to_string(f.epochs) + "\n";
  history += "epoch,train_loss,train_subset_accuracy,eval_loss\n";
  for (const auto& r : trained.history) {
    history += std::to_string(r.epoch) + "," + num(r.train_loss, 17) + "," + num(r.train_subset_accuracy, 17) + "," +
               (r.eval_loss ? num(*r.eval_loss, 17) : std::string()) + "\n";
  }
  std::vector<char> is_eval(entries.size(), 0);
  for (auto i : split.eval) is_eval[i] = 1;
  std::string split_text = "# seed=" + std::to_string(f.seed) + " eval_fraction=" + num(f.eval_fraction) + "\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    split_text += entries[i].trailer_id + "\t" + (is_eval[i] ? "eval" : "train") + "\n";
  }

  fs::create_directories(dir);
  save_checkpoint(trained, dir / kCheckpointFile);
  write_text(dir / (features.vocab ? kVocabFile : kTfidfFile),
             features.vocab ? features.vocab->serialize() : features.tfidf->serialize());
  write_text(dir / "history.csv", history);
  write_text(dir / "split.tsv", split_text);
  write_text(dir / "summary.txt", summary);
  out << "checkpoint written to " << (dir / kCheckpointFile).string() << "\n";
  return kExitOk;
}

struct EvaluateFlags {
  ScoreInputs inputs;
  std::string out;
  double threshold = kDefaultThreshold;
  std::string modalities;
  std::string column = "value";
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const auto scored = score(f.inputs);
  const auto& preds = scored.preds;

  std::string modalities = f.modalities;
  if (modalities.empty() && scored.corpus) modalities = read_meta(meta_path(*scored.corpus))["modalities"];
  const auto mask = ModalityMask::parse(modalities.empty() ? "S,D,M" : modalities);

  const auto prf = prf_at_threshold(preds, f.threshold);
  const auto micro = try_micro(preds);
  const auto curves = per_genre_pr_curves(preds);
  std::array<std::optional<double>, kGenreCount> genre_ap;
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    if (curves[g]) genre_ap[g] = au_prc(*curves[g]);
  }
  const std::vector<AuPrcRow> model_rows{
      {feature_set_label(mask), scored.model_name, micro ? std::optional(au_prc(*micro)) : std::nullopt}};

  const fs::path dir(f.out);
  write_text(dir / "prf.csv", prf_table_csv(prf, f.column));
  write_text(dir / "prf.txt", prf_table_text(prf, f.column));
  write_text(dir / "au_prc.csv", model_au_prc_csv(model_rows));
  write_text(dir / "au_prc.txt", model_au_prc_text(model_rows));
  write_text(dir / "genre_au_prc.csv", genre_au_prc_csv(genre_ap));
  write_text(dir / "genre_au_prc.txt", genre_au_prc_text(genre_ap));
  write_text(dir / "pr_curves.csv", pr_curves_csv(curves, micro));
  write_text(dir / "scores.csv", scores_csv(preds));

  out << prf_table_text(prf, f.column) << "\n" << model_au_prc_text(model_rows) << "\n" << genre_au_prc_text(genre_ap);
  return kExitOk;
}

struct ExportFlags {
  ScoreInputs inputs;
  std::string out;
};

int cmd_export_pr(const ExportFlags& f, std::ostream& out) {
  const auto scored = score(f.inputs);
  const auto text = pr_curves_csv(per_genre_pr_curves(scored.preds), try_micro(scored.preds));
  if (f.out.empty() || f.out == "-") {
    out << text;
  } else {
    write_text(f.out, text);
  }
  return kExitOk;
}

struct PredictFlags {
  std::string checkpoint;
  std::string features;
  std::string corpus;
  std::string manifest;
  std::string out;
  double threshold = kDefaultThreshold;
  PipelineFlags pipeline;
};

int cmd_predict(const PredictFlags& f, std::ostream& out, std::ostream& err) {
  if (f.corpus.empty() == f.manifest.empty()) throw Error(ErrorCode::InvalidConfig, "give exactly one of --corpus or --manifest");
  const auto model = load_checkpoint(fs::path(f.checkpoint));
  const auto features = load_features(model, f.features, f.checkpoint);
  const auto hash = features.hash();

  std::vector<std::pair<std::string, std::string>> docs;
  if (!f.corpus.empty()) {
    auto in = open_input(f.corpus);
    for (auto& e : read_corpus(in)) docs.emplace_back(std::move(e.trailer_id), std::move(e.text));
  } else {
    const fs::path work = f.pipeline.work_dir.empty() ? fs::temp_directory_path() / "genreflow-predict" : fs::path();
    auto pipeline = make_pipeline(f.pipeline, f.manifest, work);
    const auto records = load_manifest(f.manifest);
    for (auto& o : build_corpora(records, pipeline.recognizers(), pipeline.options)) {
      if (!o.corpus) {
        err << "error: " << o.error->what() << "\n";
        return exit_code_for(o.error->code());
      }
      docs.emplace_back(o.trailer_id, o.corpus->c_sd);
    }
  }

  csv::Row header{"trailer_id"};
  for (auto g : kAllGenres) header.emplace_back(genre_name(g));
  header.emplace_back("predicted");
  header.emplace_back("empty_corpus");
  std::string text = csv_line(header);
  for (const auto& [id, doc] : docs) {
    const auto probs = predict(model, features.encode(doc), hash);
    csv::Row row{id};
    std::string predicted;
    for (std::size_t g = 0; g < kGenreCount; ++g) {
      row.push_back(num(probs[g], 9));
      if (probs[g] >= f.threshold) predicted += (predicted.empty() ? "" : "|") + std::string(genre_name(kAllGenres[g]));
    }
    row.push_back(predicted);
    row.push_back(doc.empty() ? "1" : "0");
    text += csv_line(row);
  }
  if (f.out.empty() || f.out == "-") {
    out << text;
  } else {
    write_text(f.out, text);
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PluginFailure:
    case ErrorCode::PluginTimeout:
    case ErrorCode::MalformedResponse:
    case ErrorCode::MissingEntry:
    case ErrorCode::EmptyCandidates:
      return kExitPlugin;
    case ErrorCode::NonFinite:
    case ErrorCode::NonFiniteLoss:
      return kExitNumeric;
    case ErrorCode::HashMismatch:
    case ErrorCode::CorruptCheckpoint:
    case ErrorCode::VersionMismatch:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::IndexOutOfRange:
      return kExitArtifact;
    case ErrorCode::StaleCache:
      return kExitFailure;
    default:
      return kExitConfig;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal movie-trailer genre classification", "genreflow"};
  app.set_config("--config", "", "key=value file; subcommand keys go under [subcommand] sections");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  IngestFlags ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a manifest and write a normalized copy plus a split");
  ingest_cmd->add_option("--manifest", ingest.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();
  ingest_cmd->add_option("--eval-fraction", ingest.eval_fraction)->capture_default_str();
  ingest_cmd->add_option("--seed", ingest.seed)->capture_default_str();
  ingest_cmd->add_flag("--stratify", ingest.stratify, "Stratify the split by label pattern");

  BuildFlags build;
  auto* build_cmd = app.add_subcommand("build-corpus", "Run the recognizers and write the fused corpus");
  build_cmd->add_option("--manifest", build.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build.out, "Corpus file")->required();
  build_cmd->add_option("--report", build.report, "Per-trailer report (default: <out>.report.tsv)");
  build_cmd->add_flag("--skip-failures", build.skip_failures, "Write the corpus even if some trailers fail");
  add_pipeline_flags(build_cmd, build.pipeline);

  TrainFlags train_f;
  auto* train_cmd = app.add_subcommand("train", "Train ECnet or TFAnet on a corpus");
  train_cmd->add_option("--corpus", train_f.corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model", train_f.model, "ecnet or tfanet")->capture_default_str();
  train_cmd->add_option("--out", train_f.out, "Output directory")->required();
  train_cmd->add_option("--epochs", train_f.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train_f.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--batch-size", train_f.batch_size)->capture_default_str();
  train_cmd->add_option("--seed", train_f.seed)->capture_default_str();
  train_cmd->add_option("--eval-fraction", train_f.eval_fraction)->capture_default_str();
  train_cmd->add_option("--min-df", train_f.min_df, "Minimum document frequency")->capture_default_str();
  train_cmd->add_option("--max-len", train_f.max_len, "ECnet sequence length (0: longest training document)")
      ->capture_default_str();
  train_cmd->add_option("--max-features", train_f.max_features, "TFAnet n-gram cap")->capture_default_str();
  train_cmd->add_flag("--stratify", train_f.stratify, "Stratify the split by label pattern");
  train_cmd->add_flag("--quiet", train_f.quiet, "Suppress the summary and per-epoch lines");

  EvaluateFlags eval_f;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a corpus and write P/R/F1 and AU(PRC) reports");
  add_score_inputs(eval_cmd, eval_f.inputs);
  eval_cmd->add_option("--out", eval_f.out, "Report directory")->required();
  eval_cmd->add_option("--threshold", eval_f.threshold)->capture_default_str();
  eval_cmd->add_option("--modalities", eval_f.modalities, "Feature set label (default: from the corpus)");
  eval_cmd->add_option("--column", eval_f.column, "Value column name in the P/R/F1 table")->capture_default_str();

  PredictFlags predict_f;
  auto* predict_cmd = app.add_subcommand("predict", "Write per-trailer genre probabilities");
  predict_cmd->add_option("--checkpoint", predict_f.checkpoint)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--features", predict_f.features)->check(CLI::ExistingFile);
  predict_cmd->add_option("--corpus", predict_f.corpus, "Prebuilt corpus")->check(CLI::ExistingFile);
  predict_cmd->add_option("--manifest", predict_f.manifest, "Run the pipeline on a manifest")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_f.out, "CSV path (default: stdout)");
  predict_cmd->add_option("--threshold", predict_f.threshold)->capture_default_str();
  add_pipeline_flags(predict_cmd, predict_f.pipeline);

  ExportFlags export_f;
  auto* export_cmd = app.add_subcommand("export-pr", "Write precision-recall curves as CSV");
  add_score_inputs(export_cmd, export_f.inputs);
  export_cmd->add_option("--out", export_f.out, "CSV path (default: stdout)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(ingest, out);
    if (build_cmd->parsed()) return cmd_build_corpus(build, out, err);
    if (train_cmd->parsed()) return cmd_train(train_f, out);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_f, out);
    if (predict_cmd->parsed()) return cmd_predict(predict_f, out, err);
    if (export_cmd->parsed()) return cmd_export_pr(export_f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace genreflow::cli
