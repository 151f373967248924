#include "feedmine/http_clients.hpp"

#include "feedmine/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace feedmine {

namespace {

using nlohmann::json;

struct Transport {
    HttpClientConfig config;
    std::string host;
    std::string api_key;

    explicit Transport(HttpClientConfig cfg) : config(std::move(cfg)) {
        if (config.base_url.empty())
            throw ConfigError("http client requires a base_url");
        host = config.base_url;
        if (const char *key = std::getenv("FEEDMINE_API_KEY"))
            api_key = key;
    }

    /// POSTs a JSON body; retries transport failures with exponential
    /// backoff, then reports a retryable error carrying the post id.
    json post_json(const std::string &path, const json &body, const std::string &post_id) const {
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(200 << (attempt - 1)));
            httplib::Client cli(host);
            cli.set_connection_timeout(config.timeout_seconds);
            cli.set_read_timeout(config.timeout_seconds);
            httplib::Headers headers;
            if (!api_key.empty())
                headers.emplace("Authorization", "Bearer " + api_key);
            auto res = cli.Post(path, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) { // server-side failures are retryable
                last_error = "server returned status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw ProtocolError("post " + post_id + ": unexpected status " +
                                    std::to_string(res->status));
            try {
                return json::parse(res->body);
            } catch (const std::exception &e) {
                throw ProtocolError("post " + post_id + ": malformed JSON response: " + e.what());
            }
        }
        throw RetryableError(post_id, "post " + post_id + ": " + last_error + " after " +
                                          std::to_string(config.max_attempts) + " attempts");
    }
};

} // namespace

struct HttpDetector::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig cfg) : transport(std::move(cfg)) {}
};

HttpDetector::HttpDetector(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpDetector::~HttpDetector() = default;

int HttpDetector::max_parallelism() const { return impl_->transport.config.parallelism; }

ConcernDetection HttpDetector::detect(const WindowedText &windowed) {
    const json reply = impl_->transport.post_json(impl_->transport.config.detect_path,
                                                  json{{"text", windowed.text}}, windowed.post_id);
    if (!reply.contains("is_concern") || !reply["is_concern"].is_boolean() ||
        !reply.contains("confidence") || !reply["confidence"].is_number())
        throw ProtocolError("post " + windowed.post_id +
                            ": detector reply lacks is_concern/confidence");
    return {windowed.post_id, reply["is_concern"].get<bool>(),
            reply["confidence"].get<double>(), name()};
}

struct HttpCategorizer::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig cfg) : transport(std::move(cfg)) {}
};

HttpCategorizer::HttpCategorizer(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpCategorizer::~HttpCategorizer() = default;

int HttpCategorizer::max_parallelism() const { return impl_->transport.config.parallelism; }

Category HttpCategorizer::categorize(const WindowedText &windowed, const Taxonomy &taxonomy) {
    const PromptText prompt = assemble_category_prompt(windowed, taxonomy);
    const json reply = impl_->transport.post_json(impl_->transport.config.categorize_path,
                                                  json{{"prompt", prompt.full()}},
                                                  windowed.post_id);
    if (!reply.contains("label") || !reply["label"].is_string())
        throw ProtocolError("post " + windowed.post_id + ": categorizer reply lacks a label");
    return parse_category_response(reply["label"].get<std::string>());
}

struct HttpToxicity::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig cfg) : transport(std::move(cfg)) {}
};

HttpToxicity::HttpToxicity(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpToxicity::~HttpToxicity() = default;

int HttpToxicity::max_parallelism() const { return impl_->transport.config.parallelism; }

ToxicityAttributes HttpToxicity::score(const std::string &post_id, const std::string &text) {
    const json reply = impl_->transport.post_json(impl_->transport.config.toxicity_path,
                                                  json{{"text", text}}, post_id);
    ToxicityAttributes attrs;
    double *fields[6] = {&attrs.toxicity, &attrs.severe_toxicity, &attrs.insult,
                         &attrs.profanity, &attrs.threat,         &attrs.identity_attack};
    for (int a = 0; a < 6; ++a) {
        const char *key = kToxicityAttributeNames[a];
        if (!reply.contains(key) || !reply[key].is_number())
            throw ProtocolError("post " + post_id + ": toxicity reply lacks attribute " + key);
        *fields[a] = reply[key].get<double>();
    }
    return attrs;
}

} // namespace feedmine
