#include "traceforge/backend/remote.hpp"

#include <utility>

#include "traceforge/core/render.hpp"

namespace traceforge {

RemotePolicyBackend::RemotePolicyBackend(BackendConfig config, PromptSet prompts,
                                         std::shared_ptr<RequestLimiter> limiter)
    : client_(std::move(config), std::move(limiter)), prompts_(std::move(prompts)) {
    prompts_.validate();
}

std::vector<std::string> RemotePolicyBackend::sample_chain_action(PromptAction action,
                                                                  const ChainView& chain, int n,
                                                                  double temperature) {
    const PromptTemplate& tmpl = prompts_.for_action(action);
    GenerationRequest request;
    request.prompt_template_id = tmpl.id;
    request.chain_context =
        assemble_prompt(tmpl, {{"chain", render_chain(chain.question, chain.steps)}});
    request.temperature = temperature;
    request.n_samples = n;
    request.max_output_tokens = 256;
    request.stop_sequences = {"\n"};
    return client_.complete(request);
}

std::vector<std::string> RemotePolicyBackend::thoughts(const ChainView& chain, int n,
                                                       double temperature) {
    return sample_chain_action(PromptAction::Thought, chain, n, temperature);
}

std::vector<std::string> RemotePolicyBackend::subquestions(const ChainView& chain, int n,
                                                           double temperature) {
    return sample_chain_action(PromptAction::Subquestion, chain, n, temperature);
}

std::string RemotePolicyBackend::subanswer(const ChainView&, const std::string& sub_question,
                                           const std::vector<Document>& documents,
                                           double temperature) {
    const PromptTemplate& tmpl = prompts_.for_action(PromptAction::AnswerExtraction);
    GenerationRequest request;
    request.prompt_template_id = tmpl.id;
    request.chain_context = assemble_prompt(
        tmpl, {{"sub_question", sub_question}, {"documents", format_documents(documents)}});
    request.temperature = temperature;
    request.n_samples = 1;
    request.max_output_tokens = 128;
    request.stop_sequences = {"\n"};
    std::vector<std::string> completions = client_.complete(request);
    return completions.empty() ? std::string() : completions.front();
}

RemoteJudge::RemoteJudge(BackendConfig config, PromptSet prompts,
                         std::shared_ptr<RequestLimiter> limiter)
    : client_(std::move(config), std::move(limiter)), prompts_(std::move(prompts)) {
    prompts_.validate();
}

std::string RemoteJudge::judge(const std::string& trace_rendering) {
    const PromptTemplate& tmpl = prompts_.for_action(PromptAction::Judge);
    GenerationRequest request;
    request.prompt_template_id = tmpl.id;
    request.chain_context = assemble_prompt(tmpl, {{"trace", trace_rendering}});
    request.temperature = 0.0;
    request.n_samples = 1;
    request.max_output_tokens = 512;
    std::vector<std::string> completions = client_.complete(request);
    return completions.empty() ? std::string() : completions.front();
}

}  // namespace traceforge
