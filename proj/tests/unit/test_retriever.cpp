#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "seedforge/errors.hpp"
#include "seedforge/json_io.hpp"
#include "seedforge/retriever.hpp"

using namespace seedforge;

namespace {

// fixed hand-built 2D embeddings keyed by text
class StubEmbedder : public Gateway {
 public:
  std::string name_ = "stub";
  std::map<std::string, std::vector<double>> vectors;

  std::string complete(const ChatRequest&) override {
    raise(ErrorCode::unsupported, "completions not stubbed");
  }
  std::vector<std::vector<double>> embed(const EmbeddingRequest& req) override {
    std::vector<std::vector<double>> out;
    for (const auto& t : req.texts) {
      auto it = vectors.find(t);
      if (it == vectors.end()) raise(ErrorCode::invalid_argument, "unknown text " + t);
      auto v = it->second;
      double norm = std::sqrt(v[0] * v[0] + v[1] * v[1]);
      out.push_back({v[0] / norm, v[1] / norm});
    }
    return out;
  }
  const std::string& profile_name() const override { return name_; }
};

}  // namespace

TEST_CASE("semantic_retrieve: 2D hand-computed cosine order") {
  StubEmbedder gw;
  gw.vectors["query"] = {1.0, 0.0};
  gw.vectors["Doc One\naligned"] = {1.0, 0.0};
  gw.vectors["Doc Two\northogonal"] = {0.0, 1.0};
  std::vector<Document> corpus{{"d1", "Doc One", "aligned"}, {"d2", "Doc Two", "orthogonal"}};

  auto r = semantic_retrieve("query", corpus, 2, gw);
  REQUIRE(r.doc_ids.size() == 2);
  CHECK(r.doc_ids[0] == "d1");
  CHECK(r.doc_ids[1] == "d2");
  CHECK(r.scores[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.scores[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("semantic_retrieve: identical text ranks first with cosine ~ 1") {
  MockGateway gw;  // deterministic hash embeddings
  std::vector<Document> corpus{{"a", "", "completely different text"},
                               {"b", "", "the exact query text"},
                               {"c", "", "another unrelated body"}};
  auto r = semantic_retrieve("the exact query text", corpus, 3, gw);
  CHECK(r.doc_ids[0] == "b");
  CHECK(r.scores[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("semantic_retrieve: top_k == corpus size is a permutation") {
  MockGateway gw;
  std::vector<Document> corpus;
  for (int i = 0; i < 6; ++i) {
    corpus.push_back({"d" + std::to_string(i), "", "body " + std::to_string(i)});
  }
  auto r = semantic_retrieve("some query", corpus, 6, gw);
  std::set<std::string> ids(r.doc_ids.begin(), r.doc_ids.end());
  CHECK(ids.size() == 6);
  for (std::size_t i = 1; i < r.scores.size(); ++i) CHECK(r.scores[i] <= r.scores[i - 1]);
}

TEST_CASE("semantic_retrieve: top_k beyond corpus size violates the precondition") {
  MockGateway gw;
  std::vector<Document> corpus{{"d0", "", "x"}};
  CHECK_THROWS_AS(semantic_retrieve("q", corpus, 2, gw), Error);
}

TEST_CASE("semantic_retrieve: ties break by corpus order") {
  StubEmbedder gw;
  gw.vectors["q"] = {1.0, 0.0};
  gw.vectors["T\nsame"] = {3.0, 4.0};
  gw.vectors["U\nsame"] = {3.0, 4.0};
  std::vector<Document> corpus{{"first", "T", "same"}, {"second", "U", "same"}};
  auto r = semantic_retrieve("q", corpus, 2, gw);
  CHECK(r.doc_ids[0] == "first");
}

TEST_CASE("property: ranking is invariant under positive rescaling before normalization") {
  StubEmbedder gw;
  gw.vectors["q"] = {0.8, 0.6};
  gw.vectors["A\na"] = {1.0, 0.2};
  gw.vectors["B\nb"] = {0.1, 1.0};
  gw.vectors["C\nc"] = {0.5, 0.5};
  std::vector<Document> corpus{{"a", "A", "a"}, {"b", "B", "b"}, {"c", "C", "c"}};
  auto base = semantic_retrieve("q", corpus, 3, gw);

  for (double scale : {0.25, 3.0, 117.0}) {
    StubEmbedder scaled;
    scaled.vectors = gw.vectors;
    for (auto& [k, v] : scaled.vectors) {
      v[0] *= scale;
      v[1] *= scale;
    }
    auto r = semantic_retrieve("q", corpus, 3, scaled);
    CHECK(r.doc_ids == base.doc_ids);
  }
}

TEST_CASE("SemanticRetriever caches corpus embeddings across calls") {
  auto gw = std::make_shared<MockGateway>();
  std::vector<Document> corpus{{"d0", "", "alpha"}, {"d1", "", "beta"}};
  SemanticRetriever retriever(corpus, gw);
  retriever.retrieve("q one", 1);
  retriever.retrieve("q two", 2);
  // corpus embedded once (1 call), plus one query embedding per retrieve
  CHECK(gw->requests().empty());  // embeds don't show in chat log
}

TEST_CASE("stdio retriever adapter speaks the line protocol") {
  auto dir = std::filesystem::temp_directory_path() / "seedforge-retriever-tests";
  std::filesystem::create_directories(dir);
  auto corpus_path = dir / "corpus.jsonl";
  {
    std::vector<nlohmann::json> rows{to_json(Document{"d0", "T0", "body zero"}),
                                     to_json(Document{"d1", "T1", "body one"})};
    write_jsonl(corpus_path, rows);
  }
  // tiny adapter: scores documents by position, honours top_k
  auto script_path = dir / "adapter.py";
  write_file_atomic(script_path, R"(import json, sys
corpus = [json.loads(l) for l in open(sys.argv[1])]
for line in sys.stdin:
    req = json.loads(line)
    k = min(req["top_k"], len(corpus))
    ids = [d["doc_id"] for d in corpus[:k]]
    scores = [1.0 - 0.1 * i for i in range(k)]
    print(json.dumps({"doc_ids": ids, "scores": scores}), flush=True)
)");
  StdioRetriever retriever("toy", "python3 " + script_path.string(), corpus_path);
  auto r1 = retriever.retrieve("anything", 1);
  REQUIRE(r1.doc_ids.size() == 1);
  CHECK(r1.doc_ids[0] == "d0");
  auto r2 = retriever.retrieve("again", 2);  // same process, second round-trip
  CHECK(r2.doc_ids.size() == 2);
}
