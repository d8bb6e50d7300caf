#include "clinscreen/service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"

namespace clinscreen {

using nlohmann::json;

ClassifyService::ClassifyService(TrainedPipeline pipeline, GuardConfig guard,
                                 SummaryConfig summary,
                                 std::optional<CompletionBackend> backend,
                                 RefineChainConfig chain)
    : pipeline_(std::move(pipeline)),
      guard_(guard),
      summary_(summary),
      backend_(std::move(backend)),
      chain_(std::move(chain)) {}

std::string ClassifyService::handle(const std::string& body, int& status) const {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    status = 400;
    return json{{"error", "request body is not valid JSON"}}.dump();
  }
  if (!request.is_object() || !request.contains("text") || !request.at("text").is_string()) {
    status = 400;
    return json{{"error", "request needs a string \"text\" field"}}.dump();
  }
  bool abstractive = false;
  if (request.contains("abstractive")) {
    if (!request.at("abstractive").is_boolean()) {
      status = 400;
      return json{{"error", "\"abstractive\" must be a boolean"}}.dump();
    }
    abstractive = request.at("abstractive").get<bool>();
  }
  const std::string text = request.at("text").get<std::string>();

  if (!clinical_guard(text, pipeline_.gazetteer, guard_)) {
    status = 422;
    return json{{"error", kGuardMessage}}.dump();
  }

  ClassifyResult result;
  try {
    result = classify_text(pipeline_, text, summary_);
  } catch (const Error& e) {
    status = 400;
    return json{{"error", e.what()}}.dump();
  }

  json labels = json::object();
  json scores = json::object();
  std::vector<std::string> met_names;
  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    labels[kCriterionNames[j]] = result.labels.met[j] ? kMetString : kNotMetString;
    scores[kCriterionNames[j]] = result.scores[j];
    if (result.labels.met[j]) met_names.emplace_back(kCriterionNames[j]);
  }
  json response = {{"labels", std::move(labels)},
                   {"scores", std::move(scores)},
                   {"summary", result.summary.summary_text}};

  if (abstractive) {
    if (!backend_.has_value()) {
      status = 502;
      return json{{"error", "abstractive summaries need a configured completion backend"}}
          .dump();
    }
    try {
      response["abstractive"] =
          refine_chain_summarize(text, met_names, *backend_, chain_).summary;
    } catch (const BackendTimeout& e) {
      status = 502;
      return json{{"error", e.what()}}.dump();
    } catch (const BackendError& e) {
      status = 502;
      return json{{"error", e.what()}}.dump();
    }
  }

  status = 200;
  return response.dump();
}

bool ClassifyService::serve(const std::string& host, int port) {
  auto server = std::make_shared<httplib::Server>();
  server_ = server;
  server->Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
    int status = 500;
    const std::string body = handle(req.body, status);
    res.status = status;
    res.set_content(body, "application/json");
  });
  return server->listen(host, port);
}

void ClassifyService::stop() {
  if (auto server = std::static_pointer_cast<httplib::Server>(server_)) server->stop();
}

}  // namespace clinscreen
