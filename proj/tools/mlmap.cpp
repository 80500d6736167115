#include "mlmap/commands.hpp"
#include "mlmap/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

// flags shared by every subcommand; applied on top of the config file
struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "configuration file (key = value lines)");
    cmd->add_option("--seed", flags.seed, "random seed override");
    cmd->add_option("--threads", flags.threads, "worker thread count override");
    cmd->add_option("--out", flags.out, "output directory override");
}

mlmap::RunConfig resolve_config(const CommonFlags& flags, const std::string& model_flag) {
    mlmap::RunConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = mlmap::RunConfig::load(flags.config_path);
    } else {
        mlmap::ModelKind kind = model_flag.empty() ? mlmap::ModelKind::kM2l : mlmap::model_kind_from_name(model_flag);
        cfg = mlmap::RunConfig::defaults(kind);
    }
    if (!model_flag.empty()) {
        mlmap::ModelKind kind = mlmap::model_kind_from_name(model_flag);
        if (flags.config_path.empty() || kind != cfg.model) {
            // switching the direction re-applies that direction's defaults
            mlmap::RunConfig base = mlmap::RunConfig::defaults(kind);
            base.dataset_root = cfg.dataset_root;
            base.out_dir = cfg.out_dir;
            base.seed = cfg.seed;
            base.threads = cfg.threads;
            cfg = base;
        }
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.out) cfg.out_dir = *flags.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bidirectional mapping between whole-body motion and natural language"};
    app.require_subcommand(1);

    CommonFlags prep_flags, train_flags, gen_flags, eval_flags, ctx_flags;

    auto* prepare = app.add_subcommand("prepare", "parse the dataset and write model-ready files");
    std::string dataset_root;
    add_common(prepare, prep_flags);
    prepare->add_option("--dataset", dataset_root, "dataset directory of motion/annotation/meta triples");

    auto* train = app.add_subcommand("train", "train one direction on prepared data");
    std::string train_model_flag = "m2l";
    bool resume = false;
    add_common(train, train_flags);
    train->add_option("--model", train_model_flag, "model direction: m2l or l2m");
    train->add_flag("--resume", resume, "continue from the final checkpoint");

    auto* generate = app.add_subcommand("generate", "run a checkpoint on new inputs");
    std::string gen_checkpoint, gen_input, gen_output = "hypotheses.jsonl";
    std::optional<std::size_t> gen_width, gen_samples;
    add_common(generate, gen_flags);
    generate->add_option("--checkpoint", gen_checkpoint, "checkpoint file")->required();
    generate->add_option("--input", gen_input, "input file (motion records or sentences)")->required();
    generate->add_option("--output", gen_output, "output hypotheses file");
    generate->add_option("--beam-width", gen_width, "beam width override");
    generate->add_option("--samples", gen_samples, "samples per hypothesis override");

    auto* evaluate = app.add_subcommand("evaluate", "corpus BLEU by rank and chained relative performance");
    std::string eval_m2l, eval_split = "test";
    std::optional<std::string> eval_l2m;
    std::optional<double> eval_baseline;
    add_common(evaluate, eval_flags);
    evaluate->add_option("--m2l", eval_m2l, "motion-to-language checkpoint")->required();
    evaluate->add_option("--l2m", eval_l2m, "language-to-motion checkpoint (enables chained evaluation)");
    evaluate->add_option("--split", eval_split, "split name: train, validation or test");
    evaluate->add_option("--baseline", eval_baseline, "baseline BLEU for relative scores");

    auto* contexts = app.add_subcommand("export-contexts", "write context vectors of a split as CSV");
    std::string ctx_checkpoint, ctx_split = "test", ctx_output = "contexts.csv";
    bool with_pca = false;
    add_common(contexts, ctx_flags);
    contexts->add_option("--checkpoint", ctx_checkpoint, "checkpoint file")->required();
    contexts->add_option("--split", ctx_split, "split name");
    contexts->add_option("--output", ctx_output, "output CSV path");
    contexts->add_flag("--pca", with_pca, "append a 2-D PCA projection");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            mlmap::RunConfig cfg = resolve_config(prep_flags, "");
            if (!dataset_root.empty()) cfg.dataset_root = dataset_root;
            mlmap::PrepareSummary s = mlmap::cmd_prepare(cfg);
            std::cout << "prepared " << s.motions << " motions, " << s.annotations
                      << " annotations, vocabulary " << s.vocab_size << "\n";
        } else if (train->parsed()) {
            mlmap::RunConfig cfg = resolve_config(train_flags, train_model_flag);
            mlmap::TrainSummary s = mlmap::cmd_train(cfg, resume);
            std::cout << "trained " << s.epochs << " epochs; final train loss " << s.final_train_loss
                      << "; checkpoints: " << s.final_checkpoint << ", " << s.best_checkpoint << "\n";
        } else if (generate->parsed()) {
            mlmap::RunConfig cfg = resolve_config(gen_flags, "");
            std::size_t width = gen_width.value_or(cfg.beam_width);
            std::size_t samples = gen_samples.value_or(cfg.samples_per_hypothesis);
            std::uint64_t seed = gen_flags.seed.value_or(cfg.seed);
            std::size_t n = mlmap::cmd_generate(gen_checkpoint, gen_input, gen_output, width, samples, seed,
                                                cfg.threads);
            std::cout << "generated hypotheses for " << n << " inputs -> " << gen_output << "\n";
        } else if (evaluate->parsed()) {
            mlmap::RunConfig cfg = resolve_config(eval_flags, "");
            mlmap::EvaluateSummary s = mlmap::cmd_evaluate(cfg, eval_m2l, eval_l2m, eval_split, eval_baseline);
            std::cout << "bleu by rank:";
            for (double v : s.m2l_bleu_by_rank) std::cout << " " << v;
            std::cout << "\n";
            if (!s.chained_relative_by_rank.empty()) {
                std::cout << "chained relative (baseline " << s.baseline_bleu << "):";
                for (double v : s.chained_relative_by_rank) std::cout << " " << v;
                std::cout << "\n";
            }
        } else if (contexts->parsed()) {
            mlmap::RunConfig cfg = resolve_config(ctx_flags, "");
            std::size_t n = mlmap::cmd_export_contexts(cfg, ctx_checkpoint, ctx_split, with_pca, ctx_output);
            std::cout << "exported " << n << " context vectors -> " << ctx_output << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
