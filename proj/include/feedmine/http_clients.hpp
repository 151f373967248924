#pragma once

#include "feedmine/classify.hpp"
#include "feedmine/sentiment.hpp"

#include <memory>
#include <string>

namespace feedmine {

/// Connection settings shared by the HTTP-backed clients. The API key is read
/// from the FEEDMINE_API_KEY environment variable, never from config files.
struct HttpClientConfig {
    std::string base_url;          // e.g. "http://localhost:8080"
    std::string detect_path = "/v1/detect";
    std::string categorize_path = "/v1/categorize";
    std::string toxicity_path = "/v1/toxicity";
    int timeout_seconds = 30;
    int max_attempts = 3;          // exponential backoff between attempts
    int parallelism = 1;
};

/// POSTs {"text": ...} and expects {"is_concern": bool, "confidence": real}.
class HttpDetector : public DetectorClient {
  public:
    explicit HttpDetector(HttpClientConfig config);
    ~HttpDetector() override;

    std::string name() const override { return "http"; }
    ConcernDetection detect(const WindowedText &windowed) override;
    int max_parallelism() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// POSTs {"prompt": ...} and expects {"label": string}; the label must parse
/// as exactly one category (single-label contract).
class HttpCategorizer : public CategorizerClient {
  public:
    explicit HttpCategorizer(HttpClientConfig config);
    ~HttpCategorizer() override;

    std::string name() const override { return "http"; }
    Category categorize(const WindowedText &windowed, const Taxonomy &taxonomy) override;
    int max_parallelism() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// POSTs {"text": ...} and expects the six toxicity attributes as numbers.
class HttpToxicity : public ToxicityProvider {
  public:
    explicit HttpToxicity(HttpClientConfig config);
    ~HttpToxicity() override;

    std::string name() const override { return "http"; }
    ToxicityAttributes score(const std::string &post_id, const std::string &text) override;
    int max_parallelism() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace feedmine
