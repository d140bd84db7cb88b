#include <doctest.h>

#include "seedforge/errors.hpp"
#include "seedforge/templates.hpp"

using namespace seedforge;

namespace {
const std::filesystem::path kTemplateDir =
    std::filesystem::path(SEEDFORGE_REPO_DIR) / "templates";
}

TEST_CASE("template store loads the repo templates with versions") {
  auto store = TemplateStore::load_dir(kTemplateDir);
  for (const char* name :
       {"question_graph_extraction", "triplet_extraction", "replacement_proposal",
        "context_regeneration", "no_context_probe", "entailment_probe", "qa_with_context"}) {
    CAPTURE(name);
    CHECK(store.contains(name));
    CHECK(store.version(name) >= 1);
  }
  CHECK(store.versions().size() >= 7);
}

TEST_CASE("render substitutes slots and rejects missing ones") {
  auto store = TemplateStore::load_dir(kTemplateDir);
  std::string out = store.render("no_context_probe",
                                 {{"question", "Who founded Braymoor Works?"},
                                  {"choices_block", ""}});
  CHECK(out.find("Who founded Braymoor Works?") != std::string::npos);
  CHECK(out.find("{{") == std::string::npos);

  CHECK_THROWS_AS(store.render("no_context_probe", {}), Error);
  CHECK_THROWS_AS(store.render("no_such_template", {}), Error);
}
