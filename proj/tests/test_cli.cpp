#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "util.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stderr is discarded; only stdout is compared for stability
Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + std::string(AMALGAM_DATA_DIR) + "' && " + env + " '" + AMALGAM_CLI + "' " + args +
                          " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("cli: documented examples") {
  const auto c = cli("classify --flavor ct --q 2 sec7-1.dyn");
  CHECK(c.code == 0);
  CHECK(c.out.rfind("2 classes: 1 orientable, 1 non-orientable\n", 0) == 0);
  const auto l = cli("lattice --q 3 dominating-n3.dyn");
  CHECK(l.code == 0);
  CHECK(contains(l.out, "converges=true\n"));
  CHECK(contains(l.out, "paper_bound=true\n"));
  const auto e = cli("enumerate --subgroup trivial a3-f2.pres");
  CHECK(e.code == 0);
  CHECK(e.out.rfind("index 20160\n", 0) == 0);
}

TEST_CASE("cli: every subcommand is byte-stable") {
  for (const char* args : {"check sec7-1.dyn", "classify --q 2 sec7-1.dyn", "classify --flavor phan --q 3 cycle4.dyn",
                           "cover --q 2 sec7-1.dyn --emit", "growth dominating-n3.dyn", "lattice --q 4 triangle.dyn",
                           "twisted --cover cycle4.dyn --radius 6", "present sec7-1.desc --strategy steinberg",
                           "abelianize sec7-1.desc", "enumerate --q 2 a3.dyn --strategy steinberg --method felsch",
                           "export-gap sec7-1.desc --relator '(n3*n4*n5*n6*n5*n4)^2'", "--json cover sec7-1.desc"}) {
    CAPTURE(args);
    const auto a = cli(args);
    const auto b = cli(args);
    CHECK(a.code == 0);
    CHECK_FALSE(a.out.empty());
    CHECK(a.out == b.out);
  }
}

TEST_CASE("cli: golden GAP export") {
  const auto g = cli("export-gap sec7-1.desc --relator '(n3*n4*n5*n6*n5*n4)^2'");
  CHECK(g.code == 0);
  CHECK(g.out == testutil::golden("sec7-1-relator.g"));
  const auto ab = cli("abelianize sec7-1.desc --relator '(n3*n4*n5*n6*n5*n4)^2'");
  CHECK(contains(ab.out, "abelianization: []\ntrivial: true\n"));
}

TEST_CASE("cli: json output") {
  const auto j = cli("--json classify --q 2 sec7-1.dyn");
  CHECK(j.code == 0);
  CHECK(j.out.rfind("{\n  \"flavor\": \"CT\",\n  \"q\": 2,\n  \"classes\": 2,\n  \"orientable\": 1,", 0) == 0);
  const auto after = cli("classify --q 2 sec7-1.dyn --json");
  CHECK(after.out == j.out);
}

TEST_CASE("cli: exit codes") {
  CHECK(cli("check missing.dyn").code == 1);
  CHECK(cli("check /dev/null/none.dyn").code == 1);
  CHECK(cli("check a3-f2.pres").code == 1);
  CHECK(cli("classify --q 6 sec7-1.dyn").code == 1);
  CHECK(cli("present sec7-1.desc --relator n9").code == 1);
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate sec7-1.dyn").code == 2);
  CHECK(cli("classify sec7-1.dyn").code == 2);
  CHECK(cli("lattice dominating-n3.dyn --q x").code == 2);
  CHECK(cli("enumerate a3-f2.pres --method bfs").code == 2);
  CHECK(cli("twisted cycle4.dyn").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("cli: coset cap from the environment") {
  const auto small = cli("enumerate a3-f2.pres", "AMALGAM_MAX_COSETS=100");
  CHECK(small.code == 1);
  CHECK(contains(small.out, "status=overflow"));
  CHECK(cli("enumerate a3-f2.pres", "AMALGAM_MAX_COSETS=oops").code == 1);
  const auto flag = cli("enumerate a3-f2.pres --max-cosets 1000000", "AMALGAM_MAX_COSETS=100");
  CHECK(flag.code == 0);
  CHECK(flag.out.rfind("index 20160\n", 0) == 0);
}
