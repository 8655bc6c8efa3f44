#pragma once

#include <memory>
#include <string>

#include "nblens/config.hpp"
#include "nblens/model_io.hpp"
#include "nblens/nb_metrics.hpp"

namespace httplib {
class Server;
}

namespace nblens {

struct ServiceConfig {
    std::size_t max_body_bytes = 10 * 1024 * 1024;
};

// Stateless prediction endpoints over an immutable model + popularity table:
//   GET  /health            -> {"status":"ok","model_version":...}
//   POST /metrics[?pt=N]    -> the 34 metrics as a name->value map
//   POST /predict[?pt=N]    -> {"label","probability","metrics"}
// The request body is the notebook file itself. PT defaults to 0 because the
// service sees no repository metadata.
class MetricsService {
public:
    MetricsService(ModelBundle model, PopularityTable popularity, PipelineConfig pipeline,
                   ServiceConfig service = {});

    void install_routes(httplib::Server& server) const;

    // Shared with the CLI so both produce identical numbers.
    std::string metrics_json(const std::string& body, int pt) const;
    std::string predict_json(const std::string& body, int pt) const;

private:
    MetricVector extract(const std::string& body, int pt) const;

    ModelBundle model_;
    PopularityTable popularity_;
    PipelineConfig pipeline_;
    ServiceConfig service_;
};

}  // namespace nblens
