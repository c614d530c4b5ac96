#include "genreflow/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "genreflow/textprep.hpp"

namespace genreflow {
namespace {

namespace fs = std::filesystem;

std::string join_nonempty(std::span<const std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

fs::path resolve(const fs::path& media, const fs::path& root) {
  if (media.is_absolute() || root.empty()) return media;
  return root / media;
}

char modality_letter(Modality m) {
  switch (m) {
    case Modality::Situation: return 'S';
    case Modality::Dialogue: return 'D';
    case Modality::Metadata: return 'M';
  }
  return '?';
}

std::optional<Modality> modality_from_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'S': return Modality::Situation;
    case 'D': return Modality::Dialogue;
    case 'M': return Modality::Metadata;
    default: return std::nullopt;
  }
}

std::vector<Modality> parse_letters(std::string_view text) {
  std::vector<Modality> out;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
    auto m = modality_from_letter(c);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown modality '" + std::string(1, c) + "'");
    out.push_back(*m);
  }
  return out;
}

std::string situation_text(const TrailerRecord& record, SituationRecognizer& recognizer,
                           const PipelineOptions& options) {
  fs::path video = resolve(*record.video_path, options.media_root);
  std::int64_t total = recognizer.frame_count(record.id, video);
  if (total == 0) return {};
  FramePlan plan = plan_frames(total, options.frame_stride, record.id);
  SituationRequest request{record.id, video, plan.frame_indices, plan.target_width, plan.target_height};
  auto frames = recognizer.recognize(request);
  auto situations = best_situations(frames);
  return build_situation_corpus(situations, options.verb_definitions);
}

std::string dialogue_text(const TrailerRecord& record, SpeechRecognizer& recognizer,
                          const PipelineOptions& options) {
  fs::path audio = resolve(*record.audio_path, options.media_root);
  auto envelope = recognizer.envelope(record.id, audio);
  if (envelope.empty()) return {};
  AudioChunkPlan plan = chunk_audio(envelope, options.silence, record.id);
  SpeechRequest request{record.id, audio, plan.chunks};
  auto transcripts = recognizer.transcribe(request);
  return build_dialogue_corpus(transcripts);
}

}  // namespace

ModalityMask ModalityMask::parse(std::string_view text) {
  ModalityMask mask{false, false, false};
  for (Modality m : parse_letters(text)) {
    switch (m) {
      case Modality::Situation: mask.situation = true; break;
      case Modality::Dialogue: mask.dialogue = true; break;
      case Modality::Metadata: mask.metadata = true; break;
    }
  }
  if (mask.empty()) throw Error(ErrorCode::InvalidArgument, "modality mask must name at least one of S, D, M");
  return mask;
}

std::string ModalityMask::to_string() const {
  std::string out;
  for (Modality m : {Modality::Situation, Modality::Dialogue, Modality::Metadata}) {
    if (!enabled(m)) continue;
    if (!out.empty()) out.push_back(',');
    out.push_back(modality_letter(m));
  }
  return out;
}

std::string ModalityMask::model_label() const {
  if (situation && (dialogue || metadata)) return "M_SD";
  if (situation) return "M_S";
  return "M_D";
}

bool ModalityMask::enabled(Modality m) const noexcept {
  switch (m) {
    case Modality::Situation: return situation;
    case Modality::Dialogue: return dialogue;
    case Modality::Metadata: return metadata;
  }
  return false;
}

FusionOrder parse_fusion_order(std::string_view text) {
  auto letters = parse_letters(text);
  std::set<Modality> unique(letters.begin(), letters.end());
  if (letters.size() != 3 || unique.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "fusion order must be a permutation of D,S,M");
  }
  return {letters[0], letters[1], letters[2]};
}

std::string fusion_order_to_string(const FusionOrder& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back(modality_letter(order[i]));
  }
  return out;
}

std::string build_situation_corpus(std::span<const Situation> situations, bool include_definitions) {
  std::vector<std::string> sentences;
  sentences.reserve(situations.size() * (include_definitions ? 2 : 1));
  for (const auto& s : situations) {
    sentences.push_back(render_situation(s));
    if (include_definitions && !s.definition.empty()) sentences.push_back(s.definition);
  }
  return normalize_text(join_nonempty(sentences));
}

std::string build_dialogue_corpus(std::span<const std::string> transcripts) {
  return normalize_text(join_nonempty(transcripts));
}

std::string build_metadata_corpus(const TrailerRecord& record) {
  std::vector<std::string> parts = {record.description, record.plot};
  parts.insert(parts.end(), record.keywords.begin(), record.keywords.end());
  return normalize_text(join_nonempty(parts));
}

std::string fuse(std::string_view c_d, std::string_view c_s, std::string_view c_m, const FusionOrder& order) {
  std::vector<std::string> parts;
  for (Modality m : order) {
    switch (m) {
      case Modality::Dialogue: parts.emplace_back(c_d); break;
      case Modality::Situation: parts.emplace_back(c_s); break;
      case Modality::Metadata: parts.emplace_back(c_m); break;
    }
  }
  return join_nonempty(parts);
}

TrailerCorpus prepare_inference_corpus(const TrailerRecord& record, const Recognizers& recognizers,
                                       const PipelineOptions& options) {
  try {
    TrailerCorpus out;
    out.trailer_id = record.id;
    if (options.modalities.metadata) out.c_m = build_metadata_corpus(record);
    if (options.modalities.situation && record.video_path) {
      if (!recognizers.situation) throw Error(ErrorCode::InvalidConfig, "situation modality enabled without a recognizer");
      out.c_s = situation_text(record, *recognizers.situation, options);
    }
    if (options.modalities.dialogue && record.audio_path) {
      if (!recognizers.speech) throw Error(ErrorCode::InvalidConfig, "dialogue modality enabled without a recognizer");
      out.c_d = dialogue_text(record, *recognizers.speech, options);
    }
    out.c_sd = fuse(out.c_d, out.c_s, out.c_m, options.order);
    return out;
  } catch (const Error& e) {
    throw Error(e.code(), "trailer '" + record.id + "': " + e.what());
  }
}

std::vector<TrailerOutcome> build_corpora(std::span<const TrailerRecord> records, const Recognizers& recognizers,
                                          const PipelineOptions& options) {
  std::vector<TrailerOutcome> outcomes(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      auto& slot = outcomes[i];
      slot.trailer_id = records[i].id;
      try {
        slot.corpus = prepare_inference_corpus(records[i], recognizers, options);
      } catch (const Error& e) {
        slot.error = e;
      } catch (const std::exception& e) {
        slot.error = Error(ErrorCode::PluginFailure, "trailer '" + records[i].id + "': " + e.what());
      }
    }
  };

  std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(records.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return outcomes;
}

CorpusSet build_training_corpus(std::span<const TrailerRecord> records, const Recognizers& recognizers,
                                const PipelineOptions& options) {
  auto outcomes = build_corpora(records, recognizers, options);
  CorpusSet set;
  bool any_text = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error) throw *outcomes[i].error;
    any_text = any_text || !outcomes[i].corpus->c_sd.empty();
    set.corpora.push_back(std::move(*outcomes[i].corpus));
    set.labels.push_back(records[i].labels());
  }
  if (!any_text) throw Error(ErrorCode::AllEmptyCorpus, "every fused corpus is empty");
  return set;
}

CorpusSet build_training_corpus(const DatasetSplit& split, const Recognizers& recognizers,
                                const PipelineOptions& options) {
  return build_training_corpus(std::span<const TrailerRecord>(split.train), recognizers, options);
}

std::vector<CorpusEntry> to_entries(const CorpusSet& set) {
  std::vector<CorpusEntry> out;
  out.reserve(set.corpora.size());
  for (std::size_t i = 0; i < set.corpora.size(); ++i) {
    out.push_back({set.corpora[i].trailer_id, set.labels.at(i), set.corpora[i].c_sd});
  }
  return out;
}

void write_corpus(std::ostream& out, std::span<const CorpusEntry> entries) {
  for (const auto& e : entries) {
    if (e.trailer_id.find_first_of("\t\n\r") != std::string::npos ||
        e.text.find_first_of("\t\n\r") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "corpus fields may not contain tabs or newlines ('" + e.trailer_id + "')");
    }
    out << e.trailer_id << '\t' << e.labels.to_bits() << '\t' << e.text << '\n';
  }
}

void write_corpus(std::ostream& out, const CorpusSet& set) {
  auto entries = to_entries(set);
  write_corpus(out, std::span<const CorpusEntry>(entries));
}

std::vector<CorpusEntry> read_corpus(std::istream& in) {
  std::vector<CorpusEntry> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw Error(ErrorCode::MalformedFile, "corpus line " + std::to_string(line_no) + " must have 3 tab-separated fields");
    }
    CorpusEntry e;
    e.trailer_id = line.substr(0, t1);
    if (e.trailer_id.empty()) throw Error(ErrorCode::MalformedFile, "corpus line " + std::to_string(line_no) + ": empty id");
    try {
      e.labels = LabelVector::from_bits(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    } catch (const Error& err) {
      throw Error(ErrorCode::MalformedFile, "corpus line " + std::to_string(line_no) + ": " + err.what());
    }
    e.text = line.substr(t2 + 1);
    if (!seen.insert(e.trailer_id).second) {
      throw Error(ErrorCode::DuplicateId, "corpus line " + std::to_string(line_no) + ": duplicate id '" + e.trailer_id + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace genreflow
