"""
Driving the environment from outside the process
================================================

An external agent never imports this package: it connects to a line-oriented
JSON protocol, reads the state schema from the handshake, and exchanges
step/outcome messages. This script starts the TCP server in-process, speaks
the protocol as a client would, cross-checks the remote trace against an
in-process rollout of the same seed and actions, and prints the dialogue.
"""
import json

from sagin_aoi import EnvClient, ProtocolServer, default_config, run_episode
from sagin_aoi.metrics import trace_to_csv_text

cfg = default_config(episode_slots=40)

server = ProtocolServer(cfg)  # port 0: the OS picks a free one
server.serve_in_thread()
host, port = server.endpoint
print(f"server listening on {host}:{port}")

client = EnvClient.connect_tcp(host, port)
hello = client.hello()
print(f"handshake: protocol {hello['protocol_version']}, "
      f"{hello['num_satellites']} satellites, {hello['num_users']} users")
print("state layout:")
for entry in hello["schema"]:
    print(f"  {entry['name']:<16s} shape {entry['shape']} [{entry['units']}]")
print()

# a scripted driver: always pick the lowest-index visible satellite
state = client.reset(seed=42)
print(f"reset(42): t={state['t']}, {sum(state['visible_mask'])} visible")

actions = []
total_reward = 0.0
done = False
records = []
while not done:
    mask = state["visible_mask"]
    action = mask.index(1) if 1 in mask else None
    out = client.step(action)
    actions.append(-1 if action is None else action)
    total_reward += out["reward"]
    records.append({"episode": 0, **out["record"]})
    state = out
    done = out["done"]
print(f"episode done after {len(actions)} steps, total reward {total_reward:.3f}")

# protocol errors are answered, not fatal: the session keeps going afterwards
try:
    client.step(999)
except Exception as err:
    print(f"out-of-range step answered with: {err}")

client.close()
server.shutdown()
server.server_close()
print()

# the same episode driven in-process, replaying the recorded actions verbatim
local = run_episode(cfg, "ewg", seed=42, actions=actions)
local_rows = [{"episode": 0, **rec} for rec in local.records]
identical = trace_to_csv_text(records, cfg.num_users) == trace_to_csv_text(local_rows, cfg.num_users)
print(f"remote trace equals in-process trace byte for byte: {identical}")

# one raw line of the wire format, for the curious
print()
print("a raw request line looks like:")
print(" ", json.dumps({"type": "step", "protocol_version": "1", "payload": {"action": 3}}))
