#include "mlmap/commands.hpp"

#include "mlmap/checkpoint.hpp"
#include "mlmap/dataset.hpp"
#include "mlmap/evaluation.hpp"
#include "mlmap/export_contexts.hpp"
#include "mlmap/motion_pipeline.hpp"
#include "mlmap/optimizer.hpp"
#include "mlmap/training.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace mlmap {

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

PreparedSplitData load_split_data(const RunConfig& cfg, const std::string& split_name) {
    PreparedSplitData data;
    std::string dir = prepared_dir(cfg);
    data.motions = read_motions_bin(dir + "/motions_" + split_name + ".bin");
    data.sentences = read_text_jsonl(dir + "/text_" + split_name + ".jsonl");
    return data;
}

Vocabulary load_vocab(const RunConfig& cfg) {
    return Vocabulary::from_json(read_text_file(prepared_dir(cfg) + "/vocab.json"));
}

std::vector<M2lEvalItem> build_m2l_items(const PreparedSplitData& data) {
    // offset-0 sequence of each motion, referenced by all its annotations
    std::map<std::string, M2lEvalItem> by_id;
    for (const PreparedMotion& m : data.motions) {
        if (m.offset != 0) continue;
        M2lEvalItem& item = by_id[m.id];
        item.id = m.id;
        item.motion = &m;
    }
    for (const PreparedText& s : data.sentences) {
        auto it = by_id.find(s.id);
        if (it != by_id.end()) it->second.references.push_back(s.tokens);
    }
    std::vector<M2lEvalItem> items;
    for (auto& [id, item] : by_id) items.push_back(std::move(item));
    return items;
}

std::vector<ChainedEvalItem> build_chained_items(const PreparedSplitData& data) {
    std::map<std::string, std::vector<std::vector<std::string>>> refs_by_id;
    for (const PreparedText& s : data.sentences) refs_by_id[s.id].push_back(s.tokens);
    std::vector<ChainedEvalItem> items;
    for (const PreparedText& s : data.sentences) {
        ChainedEvalItem item;
        item.id = s.id;
        item.sentence = &s;
        item.references = refs_by_id[s.id];
        items.push_back(std::move(item));
    }
    return items;
}

nlohmann::json optimizer_metadata(const Nadam& opt) {
    nlohmann::json j;
    j["step"] = opt.step_count();
    return j;
}

void save_checkpoint(const std::string& path, ModelKind kind, const RunConfig& cfg, ParamRegistry& reg,
                     const Nadam* opt, std::size_t epoch, double best_val, std::size_t best_epoch,
                     const std::vector<std::string>& joint_names) {
    Checkpoint ck;
    ck.model_kind = model_kind_name(kind);
    ck.config_text = cfg.serialize();
    ck.metadata["seed"] = cfg.seed;
    ck.metadata["epoch"] = epoch;
    ck.metadata["best_val"] = best_val;
    ck.metadata["best_epoch"] = best_epoch;
    ck.metadata["vocab"] = "prepared/vocab.json";
    ck.metadata["standardizer"] = "prepared/standardizer.json";
    ck.metadata["joint_names"] = joint_names;
    ck.add_registry(reg);
    if (opt) {
        ck.metadata["optimizer"] = optimizer_metadata(*opt);
        const Nadam& o = *opt;
        for (std::size_t i = 0; i < reg.count(); ++i) {
            ck.tensors.emplace_back("opt.m." + reg.name(i), const_cast<Nadam&>(o).first_moments()[i]);
            ck.tensors.emplace_back("opt.v." + reg.name(i), const_cast<Nadam&>(o).second_moments()[i]);
        }
    }
    ck.save(path);
}

}  // namespace

std::string prepared_dir(const RunConfig& cfg) { return cfg.out_dir + "/prepared"; }

std::string checkpoint_path(const RunConfig& cfg, ModelKind kind, const std::string& which) {
    return cfg.out_dir + "/checkpoint_" + model_kind_name(kind) + "_" + which + ".mlck";
}

PrepareSummary cmd_prepare(const RunConfig& cfg) {
    if (cfg.dataset_root.empty()) throw std::runtime_error("prepare: dataset_root not set");
    std::vector<MotionRecord> records = scan_dataset(cfg.dataset_root);
    if (records.empty()) throw std::runtime_error("prepare: no records under " + cfg.dataset_root);

    fs::create_directories(prepared_dir(cfg));
    const std::string dir = prepared_dir(cfg);
    write_records_jsonl(records, dir + "/records.jsonl");

    std::vector<MotionRecord> usable = filter_by_duration(records, cfg.max_duration_seconds);
    if (usable.empty()) throw std::runtime_error("prepare: every record was filtered out");

    const std::vector<std::string> joint_list = usable.front().joint_names;
    if (joint_list.size() != cfg.motion_joints)
        throw std::runtime_error("prepare: dataset has " + std::to_string(joint_list.size()) +
                                 " joints but motion_joints = " + std::to_string(cfg.motion_joints));

    std::vector<std::string> ids;
    for (const MotionRecord& r : usable) ids.push_back(r.id);
    const double ratios[3] = {cfg.train_ratio, cfg.validation_ratio, cfg.test_ratio};
    DatasetSplit split = split_dataset(ids, ratios, cfg.seed);
    write_text_file(dir + "/split.json", split.to_json());

    std::map<std::string, int> split_of;  // 0 train, 1 validation, 2 test
    for (const std::string& id : split.train) split_of[id] = 0;
    for (const std::string& id : split.validation) split_of[id] = 1;
    for (const std::string& id : split.test) split_of[id] = 2;

    SpellingTable spelling;
    if (!cfg.spelling_file.empty()) spelling = load_spelling_table(cfg.spelling_file);

    // vocabulary over the whole dataset by default, in record order
    std::vector<std::vector<std::string>> corpus;
    for (const MotionRecord& r : usable) {
        if (!cfg.vocab_full_dataset && split_of[r.id] != 0) continue;
        for (const std::string& a : r.annotations) corpus.push_back(tokenize(normalize_sentence(a, spelling)));
    }
    Vocabulary vocab = build_vocab(corpus);
    write_text_file(dir + "/vocab.json", vocab.to_json());

    // motion pipeline: joints, 100 Hz, offset downsampling
    struct RawSeq {
        std::string id;
        int offset;
        Tensor frames;
    };
    std::vector<RawSeq> raw[3];
    for (const MotionRecord& r : usable) {
        Tensor joints = select_joints(r, joint_list);
        MotionRecord tmp = r;  // resample operates on plain frames
        Tensor at100 = resample_nearest(joints, r.frame_rate_hz, 100.0);
        std::vector<Tensor> offsets = downsample_with_offsets(at100, cfg.downsample_factor);
        int bucket = split_of[r.id];
        bool too_long = false;
        for (const Tensor& seq : offsets)
            if (seq.rows > cfg.max_motion_length) too_long = true;
        if (too_long) {
            std::cerr << "warning: motion " << r.id << " exceeds " << cfg.max_motion_length
                      << " frames after downsampling, skipped\n";
            continue;
        }
        for (int off = 0; off < static_cast<int>(offsets.size()); ++off) {
            if (offsets[static_cast<std::size_t>(off)].rows == 0) continue;
            raw[bucket].push_back({r.id, off, std::move(offsets[static_cast<std::size_t>(off)])});
        }
        (void)tmp;
    }

    std::vector<const Tensor*> train_frames;
    for (const RawSeq& s : raw[0]) train_frames.push_back(&s.frames);
    Standardizer st = Standardizer::fit(train_frames);
    write_text_file(dir + "/standardizer.json", st.to_json());

    const char* split_names[3] = {"train", "validation", "test"};
    PrepareSummary summary;
    summary.vocab_size = vocab.size();

    std::map<std::string, const MotionRecord*> record_of;
    for (const MotionRecord& r : usable) record_of[r.id] = &r;

    for (int b = 0; b < 3; ++b) {
        std::vector<PreparedMotion> motions;
        for (const RawSeq& s : raw[b]) {
            MotionSequence seq = pad_and_flag(st.apply(s.frames), cfg.max_motion_length);
            PreparedMotion m;
            m.id = s.id;
            m.offset = s.offset;
            m.active_len = seq.active_len;
            m.frames = std::move(seq.frames);
            motions.push_back(std::move(m));
        }
        write_motions_bin(motions, dir + "/motions_" + split_names[b] + ".bin");

        std::vector<PreparedText> sentences;
        std::vector<std::string> split_ids = b == 0 ? split.train : b == 1 ? split.validation : split.test;
        for (const std::string& id : split_ids) {
            const MotionRecord* r = record_of[id];
            if (!r) continue;
            for (const std::string& a : r->annotations) {
                std::string norm = normalize_sentence(a, spelling);
                std::vector<std::string> tokens = tokenize(norm);
                if (tokens.size() + 2 > cfg.max_sentence_length) {
                    std::cerr << "warning: annotation of " << id << " has " << tokens.size()
                              << " tokens, over the sentence limit, skipped\n";
                    continue;
                }
                SentenceRecord enc = encode_sentence(vocab, tokens, cfg.max_sentence_length);
                PreparedText s;
                s.id = id;
                s.raw = a;
                s.tokens = std::move(enc.tokens);
                s.indices = std::move(enc.indices);
                s.active_length = enc.active_length;
                sentences.push_back(std::move(s));
                ++summary.annotations;
            }
        }
        write_text_jsonl(sentences, dir + "/text_" + split_names[b] + ".jsonl");
    }

    std::size_t counted = 0;
    for (const MotionRecord& r : usable) (void)r, ++counted;
    summary.motions = counted;

    cfg.save(dir + "/prepare_config.txt");
    return summary;
}

TrainSummary cmd_train(const RunConfig& cfg, bool resume) {
    PreparedSplitData train_data = load_split_data(cfg, "train");
    PreparedSplitData val_data = load_split_data(cfg, "validation");
    Vocabulary vocab = load_vocab(cfg);
    std::size_t vocab_size = cfg.vocabulary_size ? cfg.vocabulary_size : vocab.size();

    nlohmann::json std_json = nlohmann::json::parse(read_text_file(prepared_dir(cfg) + "/standardizer.json"));
    (void)std_json;

    std::vector<std::string> joint_names;
    {
        // joint order travels with the checkpoint so generate can re-select
        std::ifstream rec_in(prepared_dir(cfg) + "/records.jsonl");
        std::string first_line;
        if (rec_in && std::getline(rec_in, first_line) && !first_line.empty())
            joint_names = record_from_json_line(first_line).joint_names;
    }

    Rng init_rng(mix_seed({cfg.seed, 0x10, static_cast<std::uint64_t>(cfg.model == ModelKind::kL2m ? 2 : 1)}));
    std::unique_ptr<M2lModel> m2l;
    std::unique_ptr<L2mModel> l2m;
    std::unique_ptr<TrainableModel> trainable;
    if (cfg.model == ModelKind::kM2l) {
        m2l = std::make_unique<M2lModel>(M2lConfig::from_run_config(cfg, vocab_size), init_rng);
        trainable = make_trainable(*m2l);
    } else {
        l2m = std::make_unique<L2mModel>(L2mConfig::from_run_config(cfg, vocab_size), init_rng);
        trainable = make_trainable(*l2m);
    }
    ParamRegistry& reg = trainable->registry();

    NadamConfig ncfg;
    ncfg.learning_rate = cfg.learning_rate;
    Nadam opt(reg, ncfg);

    const std::string final_path = checkpoint_path(cfg, cfg.model, "final");
    const std::string best_path = checkpoint_path(cfg, cfg.model, "best");
    const std::string csv_path = cfg.out_dir + "/loss_curve_" + model_kind_name(cfg.model) + ".csv";

    std::size_t start_epoch = 0;
    double prior_best = std::numeric_limits<double>::infinity();
    std::size_t prior_best_epoch = 0;
    if (resume) {
        Checkpoint ck = Checkpoint::load(final_path);
        if (ck.model_kind != model_kind_name(cfg.model)) throw std::runtime_error("resume: checkpoint kind mismatch");
        ck.restore_registry(reg);
        for (std::size_t i = 0; i < reg.count(); ++i) {
            const Tensor* m = ck.find("opt.m." + reg.name(i));
            const Tensor* v = ck.find("opt.v." + reg.name(i));
            if (!m || !v) throw std::runtime_error("resume: checkpoint has no optimizer state");
            opt.first_moments()[i] = *m;
            opt.second_moments()[i] = *v;
        }
        opt.set_step_count(ck.metadata.at("optimizer").at("step").get<std::int64_t>());
        start_epoch = ck.metadata.at("epoch").get<std::size_t>();
        prior_best = ck.metadata.at("best_val").get<double>();
        prior_best_epoch = ck.metadata.at("best_epoch").get<std::size_t>();
    } else {
        std::ofstream csv(csv_path, std::ios::binary);
        csv << "epoch,train_loss,val_loss\n";
    }

    TrainHooks hooks;
    hooks.on_epoch = [&](std::size_t epoch, double train_loss, double val_loss) {
        std::ofstream csv(csv_path, std::ios::binary | std::ios::app);
        csv.precision(17);
        csv << epoch << "," << train_loss << "," << val_loss << "\n";
        std::cout << "epoch " << epoch << " train " << train_loss << " val " << val_loss << "\n";
    };

    TrainResult result = train_model(*trainable, train_data, val_data, cfg, opt, start_epoch, hooks);

    double best_val = prior_best;
    std::size_t best_epoch = prior_best_epoch;
    if (result.best_epoch != 0 && result.best_val < prior_best) {
        best_val = result.best_val;
        best_epoch = result.best_epoch;
        // snapshot the best-epoch parameters, then restore the final ones
        std::vector<Tensor> final_params;
        for (std::size_t i = 0; i < reg.count(); ++i) final_params.push_back(reg.tensor(i));
        for (std::size_t i = 0; i < reg.count(); ++i) reg.tensor(i) = result.best_params[i];
        save_checkpoint(best_path, cfg.model, cfg, reg, nullptr, best_epoch, best_val, best_epoch, joint_names);
        for (std::size_t i = 0; i < reg.count(); ++i) reg.tensor(i) = final_params[i];
    } else if (!fs::exists(best_path)) {
        save_checkpoint(best_path, cfg.model, cfg, reg, nullptr, cfg.training_epochs, best_val, best_epoch,
                        joint_names);
    }
    save_checkpoint(final_path, cfg.model, cfg, reg, &opt, cfg.training_epochs, best_val, best_epoch, joint_names);

    TrainSummary summary;
    summary.epochs = cfg.training_epochs;
    if (!result.curve.empty()) {
        summary.final_train_loss = result.curve.back().first;
        summary.final_val_loss = result.curve.back().second;
    }
    summary.final_checkpoint = final_path;
    summary.best_checkpoint = best_path;
    summary.loss_csv = csv_path;
    return summary;
}

LoadedModel load_model(const std::string& checkpoint_file) {
    Checkpoint ck = Checkpoint::load(checkpoint_file);
    LoadedModel lm;
    lm.kind = model_kind_from_name(ck.model_kind);
    lm.run_config = RunConfig::parse(ck.config_text);

    fs::path base = fs::path(checkpoint_file).parent_path();
    lm.vocab = Vocabulary::from_json(read_text_file((base / ck.metadata.at("vocab").get<std::string>()).string()));
    lm.standardizer =
        Standardizer::from_json(read_text_file((base / ck.metadata.at("standardizer").get<std::string>()).string()));
    if (ck.metadata.contains("joint_names"))
        lm.joint_names = ck.metadata.at("joint_names").get<std::vector<std::string>>();

    std::size_t vocab_size = lm.run_config.vocabulary_size ? lm.run_config.vocabulary_size : lm.vocab.size();
    Rng dummy(0);
    if (lm.kind == ModelKind::kM2l) {
        lm.m2l = std::make_unique<M2lModel>(M2lConfig::from_run_config(lm.run_config, vocab_size), dummy);
        ck.restore_registry(lm.m2l->registry());
    } else {
        lm.l2m = std::make_unique<L2mModel>(L2mConfig::from_run_config(lm.run_config, vocab_size), dummy);
        ck.restore_registry(lm.l2m->registry());
    }
    return lm;
}

std::size_t cmd_generate(const std::string& checkpoint_file, const std::string& input_path,
                         const std::string& output_path, std::size_t width, std::size_t samples,
                         std::uint64_t seed, int threads) {
    LoadedModel lm = load_model(checkpoint_file);
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input: " + input_path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);

    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output: " + output_path);
    out.precision(17);

    if (lm.kind == ModelKind::kM2l) {
        const RunConfig& rc = lm.run_config;
        std::vector<MotionRecord> records;
        for (const std::string& l : lines) records.push_back(record_from_json_line(l));
        std::vector<std::vector<TextHypothesis>> hyps(records.size());
        parallel_for(records.size(), threads, [&](std::size_t i) {
            const MotionRecord& r = records[i];
            Tensor joints = lm.joint_names.empty() ? r.frames : select_joints(r, lm.joint_names);
            Tensor at100 = resample_nearest(joints, r.frame_rate_hz, 100.0);
            Tensor seq = downsample_with_offsets(at100, rc.downsample_factor)[0];
            MotionSequence prepared = pad_and_flag(lm.standardizer.apply(seq), rc.max_motion_length);
            Tensor context = lm.m2l->encode_motion(prepared.frames, prepared.active_len);
            hyps[i] = lm.m2l->beam_search(context, width);
        });
        for (std::size_t i = 0; i < records.size(); ++i) {
            for (std::size_t r = 0; r < hyps[i].size(); ++r) {
                nlohmann::json j;
                j["motion_id"] = records[i].id;
                j["rank"] = r + 1;
                std::vector<std::string> words = decode_indices(lm.vocab, hyps[i][r].indices);
                std::string text;
                for (std::size_t w = 0; w < words.size(); ++w) text += (w ? " " : "") + words[w];
                j["text"] = text;
                j["log_prob"] = hyps[i][r].log_prob;
                out << j.dump() << "\n";
            }
        }
        return records.size();
    }

    // language to motion: plain sentences in, canonical motion JSONL out
    const RunConfig& rc = lm.run_config;
    std::vector<SentenceRecord> encoded(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!lines[i].empty() && lines[i].front() == '{')
            throw std::runtime_error("generate: input looks like motion records but the checkpoint is l2m");
        std::vector<std::string> tokens = tokenize(normalize_sentence(lines[i]));
        encoded[i] = encode_sentence(lm.vocab, tokens, rc.max_sentence_length);
    }
    std::vector<std::vector<MotionHypothesis>> hyps(lines.size());
    parallel_for(lines.size(), threads, [&](std::size_t i) {
        Tensor context = lm.l2m->encode_text(encoded[i].indices, encoded[i].active_length);
        Rng rng(mix_seed({seed, 0x21, i}));
        hyps[i] = lm.l2m->beam_search(context, width, samples, rng);
    });
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t r = 0; r < hyps[i].size(); ++r) {
            const MotionHypothesis& h = hyps[i][r];
            Tensor destd = lm.standardizer.invert(h.frames);
            nlohmann::json j;
            j["sentence"] = lines[i];
            j["rank"] = r + 1;
            j["log_likelihood"] = h.log_likelihood;
            j["truncated"] = h.truncated;
            j["frame_rate_hz"] = 100.0 / rc.downsample_factor;
            j["joint_names"] = lm.joint_names;
            std::vector<std::vector<double>> rows(destd.rows);
            for (std::size_t a = 0; a < destd.rows; ++a) {
                rows[a].resize(destd.cols);
                for (std::size_t b = 0; b < destd.cols; ++b) rows[a][b] = destd(a, b);
            }
            j["frames"] = rows;
            out << j.dump() << "\n";
        }
    }
    return lines.size();
}

EvaluateSummary cmd_evaluate(const RunConfig& cfg, const std::string& m2l_checkpoint,
                             const std::optional<std::string>& l2m_checkpoint, const std::string& split_name,
                             std::optional<double> baseline) {
    LoadedModel m2l = load_model(m2l_checkpoint);
    if (m2l.kind != ModelKind::kM2l) throw std::runtime_error("evaluate: first checkpoint must be m2l");

    PreparedSplitData data = load_split_data(cfg, split_name);
    std::vector<M2lEvalItem> items = build_m2l_items(data);
    BleuReport report = bleu_by_rank(*m2l.m2l, m2l.vocab, items, cfg.beam_width, cfg.threads, split_name);
    write_text_file(cfg.out_dir + "/bleu_report_" + split_name + ".json", report.to_json());
    write_text_file(cfg.out_dir + "/bleu_report_" + split_name + ".csv", report.to_csv());

    EvaluateSummary summary;
    summary.m2l_bleu_by_rank = report.scores_by_rank;

    if (l2m_checkpoint) {
        LoadedModel l2m = load_model(*l2m_checkpoint);
        if (l2m.kind != ModelKind::kL2m) throw std::runtime_error("evaluate: second checkpoint must be l2m");

        double base;
        if (baseline) {
            base = *baseline;
        } else if (split_name == "train") {
            base = report.scores_by_rank.front();
        } else {
            PreparedSplitData train_data = load_split_data(cfg, "train");
            std::vector<M2lEvalItem> train_items = build_m2l_items(train_data);
            BleuReport train_report =
                bleu_by_rank(*m2l.m2l, m2l.vocab, train_items, cfg.beam_width, cfg.threads, "train");
            base = train_report.scores_by_rank.front();
        }

        std::vector<ChainedEvalItem> chained_items = build_chained_items(data);
        ChainedReport chained =
            chained_relative_performance(*l2m.l2m, *m2l.m2l, m2l.vocab, chained_items, cfg.beam_width,
                                         cfg.samples_per_hypothesis, cfg.seed, base, cfg.threads, split_name);
        write_text_file(cfg.out_dir + "/chained_report_" + split_name + ".json", chained.to_json());
        write_text_file(cfg.out_dir + "/chained_report_" + split_name + ".csv", chained.to_csv());
        summary.chained_relative_by_rank = chained.relative_by_rank;
        summary.baseline_bleu = base;
    }
    return summary;
}

std::size_t cmd_export_contexts(const RunConfig& cfg, const std::string& checkpoint_file,
                                const std::string& split_name, bool with_pca, const std::string& output_csv) {
    LoadedModel lm = load_model(checkpoint_file);
    PreparedSplitData data = load_split_data(cfg, split_name);

    // labels come from the canonical records
    std::map<std::string, std::string> label_of;
    {
        std::ifstream in(prepared_dir(cfg) + "/records.jsonl", std::ios::binary);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) continue;
            MotionRecord r = record_from_json_line(line);
            label_of[r.id] = r.labels.empty() ? "" : r.labels.front();
        }
    }

    std::vector<ContextRow> rows;
    if (lm.kind == ModelKind::kM2l) {
        std::vector<const PreparedMotion*> motions;
        for (const PreparedMotion& m : data.motions)
            if (m.offset == 0) motions.push_back(&m);
        rows.resize(motions.size());
        parallel_for(motions.size(), cfg.threads, [&](std::size_t i) {
            Tensor ctx = lm.m2l->encode_motion(motions[i]->frames, motions[i]->active_len);
            rows[i].id = motions[i]->id;
            rows[i].label = label_of.count(motions[i]->id) ? label_of[motions[i]->id] : "";
            rows[i].values.assign(ctx.data.begin(), ctx.data.end());
        });
    } else {
        rows.resize(data.sentences.size());
        parallel_for(data.sentences.size(), cfg.threads, [&](std::size_t i) {
            const PreparedText& s = data.sentences[i];
            Tensor ctx = lm.l2m->encode_text(s.indices, s.active_length);
            rows[i].id = s.id;
            rows[i].label = label_of.count(s.id) ? label_of[s.id] : "";
            rows[i].values.assign(ctx.data.begin(), ctx.data.end());
        });
    }
    write_context_csv(rows, with_pca, output_csv);
    return rows.size();
}

}  // namespace mlmap
