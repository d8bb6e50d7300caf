#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>

#include "clinscreen/llm.hpp"
#include "clinscreen/pipeline.hpp"
#include "clinscreen/summarize.hpp"

namespace clinscreen {

// Stateless request handler around a shared read-only pipeline. The HTTP
// layer is a thin wrapper over handle(), which unit tests call directly.
class ClassifyService {
 public:
  ClassifyService(TrainedPipeline pipeline, GuardConfig guard = {},
                  SummaryConfig summary = {},
                  std::optional<CompletionBackend> backend = std::nullopt,
                  RefineChainConfig chain = default_refine_chain_config());

  // Processes one /classify request body; returns the JSON response and sets
  // the HTTP status (200 ok, 400 malformed, 422 guard, 502 backend failure).
  std::string handle(const std::string& body, int& status) const;

  // Blocks serving POST /classify until stop() is called from another thread.
  // Returns false if the address cannot be bound.
  bool serve(const std::string& host, int port);
  void stop();

  const TrainedPipeline& pipeline() const { return pipeline_; }

 private:
  TrainedPipeline pipeline_;
  GuardConfig guard_;
  SummaryConfig summary_;
  std::optional<CompletionBackend> backend_;
  RefineChainConfig chain_;
  std::shared_ptr<void> server_;  // httplib::Server, hidden from the header
};

}  // namespace clinscreen
