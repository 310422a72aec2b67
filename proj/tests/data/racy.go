package main

var c = make(chan int, 2)

func main() {
	go A()
	go B()
	go C()
}

func A() {
	c <- 1
}

func B() {
	<-c
	c <- 2
}

func C() {
	<-c
}
