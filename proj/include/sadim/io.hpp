#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sadim/dims.hpp"

namespace sadim {

using Json = nlohmann::ordered_json;

// Floats printed with 17 significant digits so equal runs give equal bytes.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const IntMatrix& M);
Json to_json(const std::vector<IntVec>& vs);
Json to_json(const NeighborGraph& G);
Json to_json(const LabeledGraph& G);
Json to_json(const FrobeniusDecomposition& fd);
Json to_json(const AuxiliaryTile& tile);
Json to_json(const PerturbedSystem& ps);
Json to_json(const BoxCountResult& bc);
Json to_json(const BoxDimEstimate& est);
Json to_json(const PerKRow& row);
Json to_json(const DimensionReport& rep);

IntMatrix matrix_from_json(const Json& j);
std::vector<IntVec> vectors_from_json(const Json& j, int dim);

// One row per k and variant: k, variant, boxdim_Fk, v_k, u_k, stabilized, wall_ms.
void write_report_csv(std::ostream& os, const DimensionReport& rep);

}  // namespace sadim
