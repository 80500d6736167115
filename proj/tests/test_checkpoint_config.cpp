#include "mlmap/checkpoint.hpp"
#include "mlmap/config.hpp"
#include "mlmap/prepared_data.hpp"
#include "mlmap/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace mlmap;
namespace fs = std::filesystem;

TEST_CASE("run config defaults per direction") {
    RunConfig m2l = RunConfig::defaults(ModelKind::kM2l);
    CHECK(m2l.encoder_units == std::vector<std::size_t>{64, 64});
    CHECK(m2l.decoder_units == std::vector<std::size_t>{128, 128});
    CHECK(m2l.embedding_dimension == 64);
    CHECK(m2l.dropout_rate == 0.4);
    CHECK(m2l.learning_rate == 1e-3);
    CHECK(std::isinf(m2l.clip_norm()));
    CHECK(m2l.batch_size == 128);
    CHECK(m2l.training_epochs == 100);
    CHECK(m2l.motion_joints == 44);
    CHECK_FALSE(m2l.layer_norm);

    RunConfig l2m = RunConfig::defaults(ModelKind::kL2m);
    CHECK(l2m.decoder_units == std::vector<std::size_t>{400, 400, 400});
    CHECK(l2m.dropout_rate == 0.1);
    CHECK(l2m.clip_norm() == 25.0);
    CHECK(l2m.mixture_components == 20);
    CHECK(l2m.layer_norm);
}

TEST_CASE("config round trip and unknown keys") {
    RunConfig c = RunConfig::defaults(ModelKind::kL2m);
    c.dataset_root = "/data/kit";
    c.seed = 99;
    c.encoder_units = {32, 16};
    RunConfig back = RunConfig::parse(c.serialize());
    CHECK(back == c);

    CHECK_THROWS(RunConfig::parse("model = m2l\nnot_a_key = 1\n"));
    CHECK_THROWS(RunConfig::parse("model = q2q\n"));

    RunConfig inf_clip = RunConfig::parse("model = m2l\ngradient_clipping = inf\n");
    CHECK(std::isinf(inf_clip.clip_norm()));
}

TEST_CASE("config comments and overrides") {
    std::string text =
        "# toy setup\n"
        "model = l2m\n"
        "dropout_rate = 0.25\n"
        "\n"
        "beam_width = 3\n";
    RunConfig c = RunConfig::parse(text);
    CHECK(c.model == ModelKind::kL2m);
    CHECK(c.dropout_rate == 0.25);
    CHECK(c.beam_width == 3);
    CHECK(c.decoder_units == std::vector<std::size_t>{400, 400, 400});  // l2m defaults retained
}

TEST_CASE("checkpoint save/load validates names and shapes") {
    fs::path path = fs::temp_directory_path() / "mlmap_test_ckpt.mlck";

    Tensor a(2, 3), b(1, 4);
    Rng rng(6);
    for (double& v : a.data) v = rng.gaussian();
    for (double& v : b.data) v = rng.gaussian();
    ParamRegistry reg;
    reg.add("layer.a", &a);
    reg.add("layer.b", &b);

    Checkpoint ck;
    ck.model_kind = "m2l";
    ck.config_text = RunConfig::defaults(ModelKind::kM2l).serialize();
    ck.metadata["seed"] = 7;
    ck.add_registry(reg);
    ck.save(path.string());

    Checkpoint loaded = Checkpoint::load(path.string());
    CHECK(loaded.model_kind == "m2l");
    CHECK(loaded.metadata.at("seed") == 7);

    Tensor a2(2, 3), b2(1, 4);
    ParamRegistry reg2;
    reg2.add("layer.a", &a2);
    reg2.add("layer.b", &b2);
    loaded.restore_registry(reg2);
    CHECK(a2.data == a.data);
    CHECK(b2.data == b.data);

    // shape mismatch
    Tensor bad(3, 2);
    ParamRegistry reg3;
    reg3.add("layer.a", &bad);
    CHECK_THROWS(loaded.restore_registry(reg3));

    // missing tensor
    Tensor c(1, 1);
    ParamRegistry reg4;
    reg4.add("layer.missing", &c);
    CHECK_THROWS(loaded.restore_registry(reg4));

    fs::remove(path);
}

TEST_CASE("checkpoint files are byte-stable") {
    fs::path p1 = fs::temp_directory_path() / "mlmap_ckpt_1.mlck";
    fs::path p2 = fs::temp_directory_path() / "mlmap_ckpt_2.mlck";
    Tensor a(2, 2, {1.0, -0.5, 1e-300, 3.14159});
    ParamRegistry reg;
    reg.add("t", &a);
    for (const fs::path& p : {p1, p2}) {
        Checkpoint ck;
        ck.model_kind = "l2m";
        ck.config_text = "model = l2m\n";
        ck.metadata["seed"] = 1;
        ck.add_registry(reg);
        ck.save(p.string());
    }
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("prepared motion binary round trip") {
    fs::path path = fs::temp_directory_path() / "mlmap_test_motions.bin";
    std::vector<PreparedMotion> motions(2);
    Rng rng(3);
    for (int i = 0; i < 2; ++i) {
        motions[i].id = "m" + std::to_string(i);
        motions[i].offset = i;
        motions[i].active_len = 3 + i;
        motions[i].frames = Tensor(6, 4);
        for (int t = 0; t < motions[i].active_len; ++t) {
            for (std::size_t j = 0; j < 3; ++j) motions[i].frames(t, j) = rng.gaussian();
            motions[i].frames(t, 3) = 1.0;
        }
    }
    write_motions_bin(motions, path.string());
    auto back = read_motions_bin(path.string());
    REQUIRE(back.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(back[i].id == motions[i].id);
        CHECK(back[i].offset == motions[i].offset);
        CHECK(back[i].active_len == motions[i].active_len);
        CHECK(back[i].frames.data == motions[i].frames.data);
    }
    fs::remove(path);
}

TEST_CASE("prepared text jsonl round trip") {
    fs::path path = fs::temp_directory_path() / "mlmap_test_text.jsonl";
    std::vector<PreparedText> sentences(1);
    sentences[0].id = "m0";
    sentences[0].raw = "A person walks.";
    sentences[0].tokens = {"a", "person", "walks"};
    sentences[0].indices = {1, 4, 5, 6, 2, 0, 0};
    sentences[0].active_length = 5;
    write_text_jsonl(sentences, path.string());
    auto back = read_text_jsonl(path.string());
    REQUIRE(back.size() == 1);
    CHECK(back[0].id == sentences[0].id);
    CHECK(back[0].raw == sentences[0].raw);
    CHECK(back[0].tokens == sentences[0].tokens);
    CHECK(back[0].indices == sentences[0].indices);
    CHECK(back[0].active_length == sentences[0].active_length);
    fs::remove(path);
}

TEST_CASE("training pairs join motions and sentences by id") {
    PreparedSplitData data;
    for (int i = 0; i < 2; ++i) {
        PreparedMotion m;
        m.id = "a";
        m.offset = i;
        m.active_len = 1;
        m.frames = Tensor(2, 2);
        m.frames(0, 1) = 1.0;
        data.motions.push_back(m);
    }
    PreparedText s1, s2, s3;
    s1.id = "a";
    s2.id = "a";
    s3.id = "b";  // no motion
    data.sentences = {s1, s2, s3};
    auto pairs = make_pairs(data);
    CHECK(pairs.size() == 4);  // 2 offsets x 2 annotations
}
