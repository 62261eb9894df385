#pragma once

#include "p2pbot/botnet.hpp"
#include "p2pbot/clique.hpp"
#include "p2pbot/community.hpp"
#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"
#include "p2pbot/flow_csv.hpp"
#include "p2pbot/ground_truth.hpp"
#include "p2pbot/mcg.hpp"
#include "p2pbot/p2p_hosts.hpp"
#include "p2pbot/pipeline.hpp"
#include "p2pbot/report.hpp"
#include "p2pbot/synth.hpp"
