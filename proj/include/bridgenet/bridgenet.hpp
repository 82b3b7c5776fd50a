#pragma once

#include "bridgenet/annotate.hpp"
#include "bridgenet/bridges.hpp"
#include "bridgenet/centrality.hpp"
#include "bridgenet/common.hpp"
#include "bridgenet/community.hpp"
#include "bridgenet/graph.hpp"
#include "bridgenet/ingest.hpp"
#include "bridgenet/pipeline.hpp"
#include "bridgenet/report.hpp"
#include "bridgenet/similarity.hpp"
#include "bridgenet/text_analysis.hpp"
#include "bridgenet/user_graph.hpp"
