#include "support/fixtures.hpp"

#include <algorithm>

namespace seedforge::testing {

namespace {

const char* kFounders[] = {"Alric Vane",    "Mira Castell",  "Tobin Hale",
                           "Sela Marchant", "Ossian Drake",  "Petra Lindqvist",
                           "Casimir Holt",  "Ingrid Vossen", "Ruben Acker",
                           "Livia Strand",  "Edmund Corrin", "Thea Walcott",
                           "Viggo Ramstad", "Oriana Bellis", "Lucan Ferris",
                           "Maren Soler",   "Dorian Eckhart", "Selma Vance",
                           "Anselm Roarke", "Greta Milburn"};

const char* kCompanies[] = {"Braymoor Works",    "Cindral Forge",    "Hollowmere Press",
                            "Quellon Textiles",  "Varn Foundry",     "Amberline Mills",
                            "Dunmore Atelier",   "Ferrow Glassworks", "Kestwick Motors",
                            "Larkspur Instruments", "Morrow Shipyard", "Nolden Breweries",
                            "Ostrand Cartage",   "Pellam Ironworks", "Quarrow Printworks",
                            "Rellick Tanneries", "Sombra Distillery", "Tarnley Looms",
                            "Umberfield Kilns",  "Wrenhall Smithy"};

const char* kCities[] = {"Veloria",   "Tarsholm",  "Quenport",   "Mirefell",
                         "Ashgrove",  "Bellharbor", "Cradlewick", "Dunvale",
                         "Elmsworth", "Farrowgate", "Glimmerton", "Harrowfield",
                         "Ironvale",  "Junipero",   "Kilnmouth",  "Lornebridge",
                         "Mossford",  "Nettlebay",  "Orchard Run", "Pinewick"};

}  // namespace

std::vector<Sample> make_fixture_seeds(const FixtureSpec& spec) {
  std::vector<Sample> seeds;
  for (int i = 0; i < spec.n_seeds; ++i) {
    std::string founder = kFounders[i % 20];
    std::string company = kCompanies[i % 20];
    std::string city = kCities[i % 20];

    bool leak_first =
        std::find(spec.leak_first_attempt.begin(), spec.leak_first_attempt.end(), i) !=
        spec.leak_first_attempt.end();
    bool leak_always = std::find(spec.leak_always.begin(), spec.leak_always.end(), i) !=
                       spec.leak_always.end();
    std::string marker = leak_always ? "radiant " : leak_first ? "glimmering " : "";

    Sample s;
    s.id = "seed-" + std::to_string(i);
    s.question = "Which " + marker + "city hosts the company founded by " + founder + "?";
    s.answer = city;
    Document d0;
    d0.doc_id = "d0";
    d0.title = company;
    d0.body = founder + " founded " + company + ".";
    Document d1;
    d1.doc_id = "d1";
    d1.title = city;
    d1.body = company + " is located in " + city + ".";
    s.contexts = {d0, d1};
    s.supporting_ids = std::vector<std::string>{"d0", "d1"};
    s.source_dataset = "custom";
    seeds.push_back(std::move(s));
  }
  return seeds;
}

std::vector<std::pair<std::string, std::string>> fixture_entity_types(
    const std::vector<Sample>& seeds) {
  std::vector<std::pair<std::string, std::string>> types;
  auto add = [&types](const std::string& surface, const std::string& type) {
    for (const auto& [s, t] : types) {
      if (s == surface) return;
    }
    types.emplace_back(surface, type);
  };
  for (int i = 0; i < 20; ++i) {
    add(kFounders[i], "person");
    add(kCompanies[i], "company");
    add(kCities[i], "city");
  }
  (void)seeds;
  return types;
}

}  // namespace seedforge::testing
