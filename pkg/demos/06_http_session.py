"""Drive the HTTP service through one editing round.

Starts the session service on a local port, uploads the synthetic scene,
paints a mask, places a drag, fetches the live preview, runs inpainting and
commits, then starts a second round on the committed result. This is the
same surface the browser UI uses.
"""
import base64
import threading
import time

import httpx
import uvicorn

from dragwarp.cases import ServiceConfig
from dragwarp.pngio import encode_image_png, encode_mask_png
from dragwarp.service import create_app

from _common import checker_scene, out_dir

out = out_dir("06")
PORT = 8639

app = create_app(config=ServiceConfig(resize_long_edge=0))
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=PORT, log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.02)

img, blob = checker_scene(160, 120)
base = f"http://127.0.0.1:{PORT}/v1"
with httpx.Client(timeout=30) as client:
    sid = client.post(f"{base}/sessions", content=encode_image_png(img),
                      headers={"content-type": "image/png"}).json()["id"]
    print(f"session {sid[:8]}… created")

    client.put(f"{base}/sessions/{sid}/mask", content=encode_mask_png(blob),
               headers={"content-type": "image/png"})
    client.put(f"{base}/sessions/{sid}/points",
               json={"pairs": [{"handle": [55, 60], "target": [100, 58]}]})

    preview = client.get(f"{base}/sessions/{sid}/preview").json()
    print(f"preview rendered in {preview['timing_ms']:.1f} ms, "
          f"{len(preview['rejected_pairs'])} rejected pair(s)")
    (out / "preview.png").write_bytes(base64.b64decode(preview["warped"]))

    edit = client.post(f"{base}/sessions/{sid}/inpaint", json={}).json()
    print(f"inpainted with backend {edit['backend_used']!r} (fallback: {edit['fallback']})")
    (out / "edited.png").write_bytes(base64.b64decode(edit["image"]))

    done = client.post(f"{base}/sessions/{sid}/commit").json()
    print(f"committed round {done['round']}; the edit is now the base image")

    second = client.get(f"{base}/sessions/{sid}/preview").json()
    (out / "round2_base.png").write_bytes(base64.b64decode(second["warped"]))

server.should_exit = True
thread.join(timeout=5)
print(f"outputs written to {out}")
