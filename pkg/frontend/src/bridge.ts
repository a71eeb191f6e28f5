// Browsers can't open raw TCP sockets, so this small bridge sits between the
// backend stream and the page: messages fan out over Server-Sent Events, and
// control messages come back in as POSTs.
//
// Usage: node dist/bridge.js [--backend host:port] [--listen port]

import * as http from "node:http";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { BackendClient } from "./client.js";
import { ServerMessage, ClientMessage } from "./types.js";

function parseArgs(argv: string[]) {
    const opts = { backendHost: "127.0.0.1", backendPort: 8765, listenPort: 8080 };
    for (let i = 0; i < argv.length; i++) {
        if (argv[i] === "--backend" && argv[i + 1]) {
            const [host, port] = argv[++i].split(":");
            opts.backendHost = host || opts.backendHost;
            if (port) opts.backendPort = parseInt(port, 10);
        } else if (argv[i] === "--listen" && argv[i + 1]) {
            opts.listenPort = parseInt(argv[++i], 10);
        }
    }
    return opts;
}

const MIME: Record<string, string> = {
    ".html": "text/html",
    ".js": "text/javascript",
    ".css": "text/css",
    ".svg": "image/svg+xml",
};

export function startBridge(
    backendHost: string,
    backendPort: number,
    listenPort: number,
): Promise<http.Server> {
    const subscribers = new Set<http.ServerResponse>();
    const backlog: ServerMessage[] = [];

    const client = new BackendClient({
        onMessage: (msg) => {
            backlog.push(msg);
            if (backlog.length > 5000) backlog.shift();
            const line = `data: ${JSON.stringify(msg)}\n\n`;
            for (const res of subscribers) res.write(line);
        },
        onClose: () => {
            for (const res of subscribers) res.end();
            subscribers.clear();
        },
    });

    const here = path.dirname(fileURLToPath(import.meta.url));
    const publicDir = path.resolve(here, "..", "public");

    const server = http.createServer((req, res) => {
        const url = req.url ?? "/";
        if (url === "/events") {
            res.writeHead(200, {
                "content-type": "text/event-stream",
                "cache-control": "no-cache",
                connection: "keep-alive",
            });
            // Late subscribers replay the retained history first so their
            // panels don't start from an empty buffer.
            for (const msg of backlog) {
                res.write(`data: ${JSON.stringify(msg)}\n\n`);
            }
            subscribers.add(res);
            req.on("close", () => subscribers.delete(res));
            return;
        }
        if (url === "/control" && req.method === "POST") {
            let body = "";
            req.on("data", (c) => (body += c));
            req.on("end", () => {
                try {
                    client.send(JSON.parse(body) as ClientMessage);
                    res.writeHead(202).end();
                } catch (err) {
                    res.writeHead(400, { "content-type": "application/json" });
                    res.end(JSON.stringify({ error: String(err) }));
                }
            });
            return;
        }
        // Static files for the dashboard page itself.
        const rel = url === "/" ? "index.html" : url.replace(/^\/+/, "");
        const file = path.resolve(publicDir, rel);
        const distFile = path.resolve(here, rel);
        const candidate = fs.existsSync(file) ? file : distFile;
        if (!candidate.startsWith(publicDir) && !candidate.startsWith(here)) {
            res.writeHead(403).end();
            return;
        }
        fs.readFile(candidate, (err, data) => {
            if (err) {
                res.writeHead(404).end("not found");
                return;
            }
            res.writeHead(200, {
                "content-type": MIME[path.extname(candidate)] ?? "application/octet-stream",
            });
            res.end(data);
        });
    });

    return client.connect(backendHost, backendPort).then(
        () =>
            new Promise((resolve) => {
                server.listen(listenPort, () => {
                    console.log(`dashboard on http://127.0.0.1:${listenPort}`);
                    resolve(server);
                });
            }),
    );
}

const isMain =
    process.argv[1] && fileURLToPath(import.meta.url) === path.resolve(process.argv[1]);
if (isMain) {
    const opts = parseArgs(process.argv.slice(2));
    startBridge(opts.backendHost, opts.backendPort, opts.listenPort).catch((err) => {
        console.error(`bridge failed: ${err.message}`);
        process.exit(1);
    });
}
