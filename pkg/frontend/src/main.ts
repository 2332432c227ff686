/**
 * Browser entry point. Reads the server origin and participant tag from the
 * query string (`?server=...&participant=...`), defaulting to same-origin.
 */

import { mountApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}
const params = new URLSearchParams(window.location.search);
const server = params.get("server") ?? "";
const participant = params.get("participant") ?? "";
mountApp(root, server, participant);
