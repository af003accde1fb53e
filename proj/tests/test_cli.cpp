#include "support/fixtures.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct RunResult {
    int status = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    std::string command = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buffer;
    while (std::size_t got = std::fread(buffer.data(), 1, buffer.size(), pipe))
        result.output.append(buffer.data(), got);
    int raw = pclose(pipe);
    result.status = WEXITSTATUS(raw);
    return result;
}

int count_lines_with(const std::string& text, const std::string& prefix) {
    int count = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        if (text.compare(pos, prefix.size(), prefix) == 0) ++count;
        pos = end + 1;
    }
    return count;
}

std::string sample(const std::string& name) { return testsupport::sample_path(name); }

std::string temp_path(const std::string& name) { return "/tmp/metakernel_test_" + name; }

}  // namespace

TEST_CASE("validate accepts the fixtures and an empty metamodel") {
    CHECK(run_cli("validate " + sample("signalflow.mm")).status == 0);

    std::string empty = temp_path("empty.mm");
    std::ofstream(empty) << "metamodel blank version 1\n";
    CHECK(run_cli("validate " + empty).status == 0);
}

TEST_CASE("validate reports invalid input with status 1") {
    std::string bad = temp_path("bad.mm");
    std::ofstream(bad) << "metamodel broken version 1\nclass A extends Ghost {\n}\n";
    RunResult result = run_cli("validate " + bad);
    CHECK(result.status == 1);
    CHECK(count_lines_with(result.output, "DIAG ") >= 1);
}

TEST_CASE("check distinguishes clean, ill-formed, and unusable inputs") {
    CHECK(run_cli("check " + sample("fig36b.mdl") + " " + sample("signalflow.mm")).status == 0);
    CHECK(run_cli("check " + sample("passup.mdl") + " " + sample("signalflow.mm")).status == 0);

    RunResult bad = run_cli("check " + sample("bad_siblings.mdl") + " " + sample("signalflow.mm"));
    CHECK(bad.status == 1);
    // one machine line per diagnostic: both OutPorts violate the constraint
    CHECK(count_lines_with(bad.output, "DIAG ") == 2);

    CHECK(run_cli("check " + sample("bad_siblings.mdl") + " " + sample("signalflow.mm") +
                  " --skip-constraints")
              .status == 0);
    CHECK(run_cli("check /no/such/file.mdl " + sample("signalflow.mm")).status == 2);
    CHECK(run_cli("check").status == 2);
}

TEST_CASE("constraints eval prints the violation protocol") {
    RunResult result =
        run_cli("constraints eval " + sample("bad_siblings.mdl") + " " + sample("signalflow.mm"));
    CHECK(result.status == 1);
    CHECK(count_lines_with(result.output, "RESULT outport_pass_up FAIL") == 1);
    CHECK(count_lines_with(result.output, "CONSTRAINT outport_pass_up VIOLATED at ") == 2);
    CHECK(result.output.find("/root/C/o1") != std::string::npos);

    RunResult clean =
        run_cli("constraints eval " + sample("passup.mdl") + " " + sample("signalflow.mm"));
    CHECK(clean.status == 0);
    CHECK(count_lines_with(clean.output, "RESULT outport_pass_up PASS") == 1);
}

TEST_CASE("merge then check runs the full pipeline") {
    std::string merged = temp_path("hybrid.mm");
    std::string report = temp_path("hybrid_report.txt");
    RunResult m = run_cli("merge " + sample("discrete.mm") + " " + sample("continuous.mm") + " " +
                          sample("hybrid.eqv") + " -o " + merged + " --report " + report);
    CHECK(m.status == 0);
    CHECK(count_lines_with(m.output, "PRODUCED System") == 1);
    CHECK(count_lines_with(m.output, "REWRITTEN ") == 2);

    std::ifstream report_in(report);
    REQUIRE(report_in.good());

    CHECK(run_cli("check " + sample("hybrid.mdl") + " " + merged).status == 0);
}

TEST_CASE("clone writes a rewritten model and reports the new path") {
    std::string out = temp_path("cloned.mdl");
    RunResult result = run_cli("clone " + sample("fig36b.mdl") + " " + sample("signalflow.mm") +
                               " /Component2 /Component1 -o " + out);
    CHECK(result.status == 0);
    CHECK(count_lines_with(result.output, "CLONE /Component1/") == 1);
    CHECK(run_cli("check " + out + " " + sample("signalflow.mm")).status == 0);

    RunResult tree = run_cli("clone tree " + out + " " + sample("signalflow.mm"));
    CHECK(tree.status == 0);
    CHECK(count_lines_with(tree.output, "CLONE ") == 2);

    // inputs are never modified: cloning from the fresh output is stable
    RunResult again = run_cli("clone tree " + sample("fig36b.mdl") + " " + sample("signalflow.mm"));
    CHECK(count_lines_with(again.output, "CLONE ") == 1);
}

TEST_CASE("evolve report emits impact lines and status 1") {
    std::string v2 = temp_path("signalflow_v2.mm");
    {
        metakernel::Metamodel mm = testsupport::load_signalflow();
        mm.version = 2;
        std::erase_if(mm.classes,
                      [](const metakernel::MetaClass& cls) { return cls.name == "OutPort"; });
        std::ofstream(v2) << metakernel::serialize_metamodel(mm);
    }
    RunResult result =
        run_cli("evolve report " + sample("signalflow.mm") + " " + v2 + " " + sample("fig36b.mdl"));
    CHECK(result.status == 1);
    CHECK(count_lines_with(result.output, "IMPACT Orphaned ") == 3);
    CHECK(count_lines_with(result.output, "IMPACT LinkInvalid ") == 2);

    RunResult same = run_cli("evolve report " + sample("signalflow.mm") + " " +
                             sample("signalflow.mm") + " " + sample("fig36b.mdl"));
    CHECK(same.status == 0);
    CHECK(same.output.empty());
}

TEST_CASE("lint flags modelling-time glyph overrides") {
    metakernel::Metamodel mm = testsupport::load_signalflow();
    metakernel::Model model = testsupport::load_model_sample("fig36b.mdl", mm);
    metakernel::annotate(model, metakernel::EntityId{4}, "glyph", "fancy");
    std::string path = temp_path("glyphs.mdl");
    std::ofstream(path) << metakernel::serialize_model(model);

    RunResult result = run_cli("lint " + path + " " + sample("signalflow.mm"));
    CHECK(result.status == 0);
    CHECK(count_lines_with(result.output, "DIAG warning ") == 1);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli("").status == 2);
    CHECK(run_cli("frobnicate x").status == 2);
    CHECK(run_cli("merge onlyone.mm").status == 2);
    CHECK(run_cli("constraints").status == 2);
}
