// Policy and judge backends that call an OpenAI-compatible chat endpoint.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "traceforge/backend/chat_client.hpp"
#include "traceforge/backend/config.hpp"
#include "traceforge/backend/interfaces.hpp"
#include "traceforge/backend/prompts.hpp"
#include "traceforge/util/limiter.hpp"

namespace traceforge {

// Renders the chain into the action's prompt template and samples from the
// chat endpoint. Thought and sub-question completions are single lines, so
// requests stop at the first newline.
class RemotePolicyBackend : public PolicyBackend {
  public:
    RemotePolicyBackend(BackendConfig config, PromptSet prompts,
                        std::shared_ptr<RequestLimiter> limiter);

    std::vector<std::string> thoughts(const ChainView& chain, int n, double temperature) override;
    std::vector<std::string> subquestions(const ChainView& chain, int n, double temperature) override;
    std::string subanswer(const ChainView& chain, const std::string& sub_question,
                          const std::vector<Document>& documents, double temperature) override;

  private:
    std::vector<std::string> sample_chain_action(PromptAction action, const ChainView& chain, int n,
                                                 double temperature);

    ChatClient client_;
    PromptSet prompts_;
};

// Judge over the same chat protocol: one greedy sample, JSON reply expected.
class RemoteJudge : public JudgeClient {
  public:
    RemoteJudge(BackendConfig config, PromptSet prompts, std::shared_ptr<RequestLimiter> limiter);

    std::string judge(const std::string& trace_rendering) override;

  private:
    ChatClient client_;
    PromptSet prompts_;
};

}  // namespace traceforge
