package main

// A receives on d before the rendezvous on gd2 that orders D.1 before A.2.

var d = make(chan int, 2)
var gd1 = make(chan int, 0)
var gd2 = make(chan int, 0)
var gd3 = make(chan int, 0)

func main() {
	go B()
	go D()
	go C()
	go A()
}

func B() {
	d <- 0
	gd1 <- 0
}

func D() {
	<-d
	gd2 <- 0
	<-gd3
	d <- 0
}

func C() {
	<-gd1
	d <- 0
	gd3 <- 0
}

func A() {
	<-d
	<-gd2
	<-d
}
